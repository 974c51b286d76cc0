#ifndef ERLANG_A_ERLANG_A_HPP
#define ERLANG_A_ERLANG_A_HPP

// Umbrella header: exact transient analysis of the M/M/m+M queue.

#include "erlang_a/log_complex.hpp"
#include "erlang_a/model.hpp"
#include "erlang_a/special_functions.hpp"
#include "erlang_a/transforms.hpp"
#include "erlang_a/first_passage.hpp"
#include "erlang_a/inversion.hpp"
#include "erlang_a/oracle.hpp"
#include "erlang_a/pcf.hpp"
#include "erlang_a/diffusion.hpp"

#endif  // ERLANG_A_ERLANG_A_HPP
