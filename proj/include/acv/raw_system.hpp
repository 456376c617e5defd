#pragma once

#include <string>

#include "acv/reach.hpp"
#include "acv/system.hpp"

namespace acv::cli {

// Textual encoding of an interpreted system as explicit states and labelled
// transitions, for models that are not derived from a policy:
//
//   agent e : p q l          # one line per agent, propositions in bit order
//   agent a : r t
//   action a11 e             # action identifier and its performing agent
//   state s1 = 01110         # valuation, declaration order of propositions
//   init s1 s5
//   trans s1 a11 s2
//
// Each action becomes a guarded update: the guard is the disjunction of its
// source-state cubes and the effect is the set of bits its edges flip, which
// must be consistent across the edges sharing the label.
kernel::System encode_raw_system(const std::string& source);

// Inverse of the encoder over the reachable fragment; the result re-encodes
// to a structurally identical system.
std::string raw_to_text(const kernel::System& sys, const mc::ReachIndex& reach);

}  // namespace acv::cli
