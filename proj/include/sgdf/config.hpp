#pragma once

// INI-style experiment configuration. Three section kinds:
//
//   [objective]   what to optimize (one per config)
//   [optimizer]   an update rule; may appear several times to compare rules
//   [run]         steps, seeds, telemetry and output options
//
// parse_config validates everything it can and reports *all* violations in
// one ConfigError rather than stopping at the first, so a config can be fixed
// in one edit cycle. The full key table lives in the README.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgdf/objectives.hpp"
#include "sgdf/optimizer.hpp"
#include "sgdf/vec.hpp"

namespace sgdf {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v);
    std::vector<std::string> violations_;
};

enum class ObjectiveKind { quadratic, rosenbrock, constant, logistic };

struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::quadratic;
    std::size_t dim = 2;          // quadratic / constant
    double kappa = 10.0;          // quadratic condition number
    double sigma = 0.0;           // additive gradient-noise std
    double value = 1.0;           // constant stream: per-coordinate gradient
    std::size_t n = 200;          // logistic: dataset size
    std::size_t batch = 10;       // logistic: minibatch size
    double margin = 2.0;          // logistic: blob separation
    std::uint64_t data_seed = 0;  // logistic: dataset seed
};

struct NamedOptimizer {
    std::string name;  // label used in CSV/SVG file names; defaults to the variant
    OptimizerConfig config;
};

struct RunSpec {
    std::size_t steps = 0;               // required, >= 1
    std::vector<std::uint64_t> seeds;    // required, nonempty
    std::optional<Vector> theta0;        // objective-dependent default when absent
    std::size_t record_every = 1;        // telemetry stride (last step always kept)
    std::string out_dir = "out";
    bool svg = false;                    // also emit loss-curve SVG
};

struct ExperimentConfig {
    ObjectiveSpec objective;
    std::vector<NamedOptimizer> optimizers;
    RunSpec run;
};

// Parses the documented INI dialect: '[section]' headers, 'key = value'
// lines, '#' or ';' comments, blank lines ignored. Throws ConfigError with
// every violation found (unknown sections/keys, bad values, range errors,
// missing required keys: objective.kind, optimizer.variant, run.steps,
// run.seeds).
ExperimentConfig parse_config(const std::string& text);

// Instantiates the objective described by the spec.
ObjectivePtr make_objective(const ObjectiveSpec& spec);

// Starting point used when [run] theta0 is absent: ones for quadratic and
// constant-stream, (-1.2, 1) for Rosenbrock (the classic start), zeros for
// logistic.
Vector default_theta0(const ObjectiveSpec& spec);

const char* objective_kind_name(ObjectiveKind k);
const char* variant_name(Variant v);

}  // namespace sgdf
