#ifndef NCCONV_JSON_IO_HPP
#define NCCONV_JSON_IO_HPP

#include <string>

#include "ncconv/measure.hpp"
#include "ncconv/operator_model.hpp"

namespace ncconv {

// Measure wire format:
//   {"domain": "real"|"positive"|"circle", "atoms": [{"x": ..., "w": ...}]}
// or, for grid densities,
//   {"domain": ..., "grid": [...], "density": [...], "atoms": [...]}
// Circle atom positions are angles in [0, 2*pi).
std::string measure_to_json(const Measure& mu);
Measure measure_from_json(const std::string& text);

// Just the atomic part, with raw (sub-probability) weights.
std::string atom_part_to_json(Domain domain, const std::vector<Atom>& atoms);

// Operator-model dump: kind, dimension, dense matrices row-major as
// [re, im] pairs, and the state vector.
std::string model_to_json(const OperatorModel& model);

}  // namespace ncconv

#endif
