#pragma once

// Run configuration: flat "key = value" text with dotted keys, '#' comments.
//
//   model.tag        single-zero-T | single-thermal | two-level-thermal |
//                    two-mode-zero-T | two-mode-thermal
//   model.omega model.gamma model.nbar
//   model.omega_a model.omega_b model.gamma_a model.gamma_b
//   model.g model.gamma_c          complex: "re" or "re,im"
//   model.branch     principal | flipped
//   initial.kind     fock | coherent | thermal | two-level-thermal | product | explicit
//   initial.n initial.alpha initial.nbar0 initial.N0 initial.path
//   initial.a.* initial.b.*         factors of a product state
//   grid.t0 grid.t1 grid.steps      steps = number of points
//   truncation.dim truncation.max_index truncation.strict truncation.pad
//   method           eigenmode | oracle | closed-form | all
//   output.path output.observables output.dump_states output.dump_path
//   oracle.kind      auto | exp | stepper
//   oracle.step
//   seed

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lindblad_modes/evolution.hpp"
#include "lindblad_modes/models.hpp"
#include "lindblad_modes/operator_space.hpp"

namespace lindblad {

enum class Method { Eigenmode, Oracle, ClosedForm, All };
std::string to_string(Method m);
Method parse_method(const std::string& s);

struct RunConfig {
    ModelSpec model;
    StateSpec initial = StateSpec::fock(0);
    TimeGrid grid;
    int max_index = -1;      // -1: default for the model
    bool strict = false;
    int pad = 0;             // extra Fock levels per mode; results are cropped back to model.dim
    Method method = Method::Eigenmode;
    std::string output_path;                 // empty: stdout
    std::vector<std::string> observables;    // empty: defaults for the model
    bool dump_states = false;
    std::string dump_path;                   // empty: <output_path>.states
    OracleKind oracle_kind = OracleKind::Auto;
    double oracle_step = 0.0;
    std::uint64_t seed = 42;
};

// Parse errors and statically checkable violations throw Error(Parse).
RunConfig parse_config(std::istream& in);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical form: only keys meaningful for the model and initial kind, sorted.
std::string serialize(const RunConfig& cfg);

// Raw key/value pairs, for tooling and tests.
std::map<std::string, std::string> parse_key_values(std::istream& in);

void validate(const RunConfig& cfg);

} // namespace lindblad
