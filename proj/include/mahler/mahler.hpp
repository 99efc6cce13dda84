#ifndef MAHLER_MAHLER_HPP
#define MAHLER_MAHLER_HPP

#include <mahler/rational.hpp>
#include <mahler/poly.hpp>
#include <mahler/algebraic.hpp>
#include <mahler/local_ring.hpp>
#include <mahler/puiseux.hpp>
#include <mahler/equation.hpp>
#include <mahler/newton.hpp>
#include <mahler/operator.hpp>
#include <mahler/solver.hpp>
#include <mahler/decision.hpp>
#include <mahler/oracle.hpp>
#include <mahler/io.hpp>

#endif
