#ifndef SUPERRES_SOLVERS_HPP
#define SUPERRES_SOLVERS_HPP

#include "superres/solvers/blot.hpp"
#include "superres/solvers/bpdn.hpp"
#include "superres/solvers/greedy.hpp"
#include "superres/solvers/least_squares.hpp"
#include "superres/solvers/recovered_signal.hpp"

#endif  // SUPERRES_SOLVERS_HPP
