#include "sgdf/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace sgdf {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

bool parse_double_str(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e && std::isfinite(out);
}

bool parse_u64_str(const std::string& s, std::uint64_t& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
}

bool parse_bool_str(const std::string& s, bool& out) {
    const std::string v = lower(s);
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        out = true;
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        out = false;
        return true;
    }
    return false;
}

struct RawSection {
    std::string name;
    std::size_t line = 0;
    // insertion order preserved; duplicate keys are reported, first one wins
    std::vector<std::pair<std::string, std::string>> entries;
};

// Typed accessor over one raw section that records violations instead of
// throwing, so every bad key in a config surfaces in a single pass.
class SectionReader {
public:
    SectionReader(const RawSection& raw, std::vector<std::string>& violations)
        : raw_(raw), violations_(violations) {
        for (const auto& [k, v] : raw_.entries) {
            if (!seen_.emplace(k, v).second)
                violations_.push_back(ctx(k) + ": duplicate key");
        }
    }

    bool has(const std::string& key) const { return seen_.count(key) != 0; }

    std::string ctx(const std::string& key) const { return "[" + raw_.name + "] " + key; }

    void fail(const std::string& key, const std::string& why) {
        violations_.push_back(ctx(key) + ": " + why);
    }

    std::optional<std::string> str(const std::string& key) {
        used_.insert(key);
        auto it = seen_.find(key);
        if (it == seen_.end()) return std::nullopt;
        return it->second;
    }

    void number(const std::string& key, double& out, double lo, double hi, bool lo_open,
                bool hi_open) {
        auto s = str(key);
        if (!s) return;
        double v = 0.0;
        if (!parse_double_str(*s, v)) {
            fail(key, "expected a finite number, got '" + *s + "'");
            return;
        }
        const bool lo_ok = lo_open ? v > lo : v >= lo;
        const bool hi_ok = hi_open ? v < hi : v <= hi;
        if (!lo_ok || !hi_ok) {
            std::ostringstream msg;
            msg << "must be in " << (lo_open ? '(' : '[') << lo << ", " << hi
                << (hi_open ? ')' : ']') << ", got " << *s;
            fail(key, msg.str());
            return;
        }
        out = v;
    }

    void natural(const std::string& key, std::size_t& out, std::size_t min_value) {
        auto s = str(key);
        if (!s) return;
        std::uint64_t v = 0;
        if (!parse_u64_str(*s, v) || v < min_value) {
            fail(key, "expected an integer >= " + std::to_string(min_value) + ", got '" + *s +
                          "'");
            return;
        }
        out = static_cast<std::size_t>(v);
    }

    void u64(const std::string& key, std::uint64_t& out) {
        auto s = str(key);
        if (!s) return;
        std::uint64_t v = 0;
        if (!parse_u64_str(*s, v)) {
            fail(key, "expected a nonnegative integer, got '" + *s + "'");
            return;
        }
        out = v;
    }

    void boolean(const std::string& key, bool& out) {
        auto s = str(key);
        if (!s) return;
        bool v = false;
        if (!parse_bool_str(*s, v)) {
            fail(key, "expected true/false, got '" + *s + "'");
            return;
        }
        out = v;
    }

    // Flags keys present in the file but never consumed by the builder.
    void report_unknown_keys() {
        for (const auto& [k, v] : raw_.entries) {
            (void)v;
            if (!used_.count(k)) violations_.push_back(ctx(k) + ": unknown key");
        }
    }

private:
    const RawSection& raw_;
    std::vector<std::string>& violations_;
    std::map<std::string, std::string> seen_;
    std::set<std::string> used_;
};

ObjectiveSpec build_objective(const RawSection& raw, std::vector<std::string>& violations) {
    SectionReader r(raw, violations);
    ObjectiveSpec spec;

    auto kind = r.str("kind");
    if (!kind) {
        r.fail("kind", "missing required key");
    } else {
        const std::string k = lower(*kind);
        if (k == "quadratic") spec.kind = ObjectiveKind::quadratic;
        else if (k == "rosenbrock") spec.kind = ObjectiveKind::rosenbrock;
        else if (k == "constant") spec.kind = ObjectiveKind::constant;
        else if (k == "logistic") spec.kind = ObjectiveKind::logistic;
        else r.fail("kind", "expected quadratic|rosenbrock|constant|logistic, got '" + *kind +
                            "'");
    }

    r.natural("dim", spec.dim, 1);
    r.number("kappa", spec.kappa, 1.0, 1e12, false, false);
    r.number("sigma", spec.sigma, 0.0, 1e12, false, false);
    r.number("value", spec.value, -1e12, 1e12, false, false);
    r.natural("n", spec.n, 2);
    r.natural("batch", spec.batch, 1);
    r.number("margin", spec.margin, 0.0, 1e12, false, false);
    r.u64("data_seed", spec.data_seed);
    r.report_unknown_keys();

    if (spec.kind == ObjectiveKind::quadratic && spec.dim == 1 && spec.kappa != 1.0)
        r.fail("kappa", "must be 1 when dim = 1 (a one-point spectrum has no range)");
    if (spec.kind == ObjectiveKind::logistic && spec.batch > spec.n)
        r.fail("batch", "must be <= n (" + std::to_string(spec.n) + "), got " +
                            std::to_string(spec.batch));
    return spec;
}

NamedOptimizer build_optimizer(const RawSection& raw, std::vector<std::string>& violations) {
    SectionReader r(raw, violations);
    NamedOptimizer named;

    Variant variant = Variant::sgdf;
    bool have_variant = false;
    auto vs = r.str("variant");
    if (!vs) {
        r.fail("variant", "missing required key");
    } else {
        const std::string v = lower(*vs);
        if (v == "sgd") variant = Variant::sgd;
        else if (v == "unified_momentum") variant = Variant::unified_momentum;
        else if (v == "sgdf") variant = Variant::sgdf;
        else if (v == "filter_adam") variant = Variant::filter_adam;
        else if (v == "sign_sgdf") variant = Variant::sign_sgdf;
        else {
            r.fail("variant",
                   "expected sgd|unified_momentum|sgdf|filter_adam|sign_sgdf, got '" + *vs + "'");
        }
        have_variant = true;
    }

    OptimizerConfig cfg = OptimizerConfig::defaults_for(variant);
    named.name = have_variant ? variant_name(variant) : "optimizer";
    if (auto n = r.str("name")) {
        if (n->empty()) r.fail("name", "must be nonempty");
        else named.name = *n;
    }

    double alpha = 0.01;
    r.number("alpha", alpha, 0.0, 1e12, true, false);
    std::string alpha_sched = "constant";
    if (auto s = r.str("alpha_schedule")) alpha_sched = lower(*s);
    double step_factor = 0.1;
    r.number("step_factor", step_factor, 0.0, 1.0, true, false);
    std::vector<double> milestones;
    bool have_milestones = false;
    if (auto s = r.str("step_milestones")) {
        have_milestones = true;
        for (const std::string& piece : split_commas(*s)) {
            double m = 0.0;
            if (!parse_double_str(piece, m) || m < 1.0) {
                r.fail("step_milestones", "expected numbers >= 1, got '" + piece + "'");
                have_milestones = false;
                break;
            }
            milestones.push_back(m);
        }
    }
    double cosine_t_max = 0.0;
    r.number("cosine_t_max", cosine_t_max, 0.0, 1e15, true, false);
    double cosine_floor = -1.0;
    r.number("cosine_floor", cosine_floor, 0.0, 1e12, true, false);

    try {
        if (alpha_sched == "constant") {
            cfg.alpha = Schedule::constant(alpha);
        } else if (alpha_sched == "inverse_sqrt") {
            cfg.alpha = Schedule::inverse_sqrt(alpha);
        } else if (alpha_sched == "step_decay") {
            if (!have_milestones) {
                r.fail("step_milestones", "required for alpha_schedule = step_decay");
            } else {
                cfg.alpha = Schedule::step_decay(alpha, step_factor, milestones);
            }
        } else if (alpha_sched == "cosine") {
            if (cosine_t_max <= 0.0) {
                r.fail("cosine_t_max", "required (> 0) for alpha_schedule = cosine");
            } else {
                const double fl = cosine_floor > 0.0 ? cosine_floor : alpha * 1e-3;
                cfg.alpha = Schedule::cosine(alpha, cosine_t_max, fl);
            }
        } else {
            r.fail("alpha_schedule",
                   "expected constant|inverse_sqrt|step_decay|cosine, got '" + alpha_sched + "'");
        }
    } catch (const std::invalid_argument& e) {
        r.fail("alpha_schedule", e.what());
    }

    r.number("beta1", cfg.beta1, 0.0, 1.0, false, true);
    r.number("beta2", cfg.beta2, 0.0, 1.0, false, true);
    r.number("eps", cfg.eps, 0.0, 1.0, true, false);

    double gamma = cfg.gamma.base();
    r.number("gamma", gamma, 0.0, 1.0, true, false);
    std::string gamma_sched = "constant";
    if (auto s = r.str("gamma_schedule")) gamma_sched = lower(*s);
    if (gamma_sched == "constant") {
        cfg.gamma = Schedule::constant(gamma);
    } else if (gamma_sched == "inverse_sqrt") {
        cfg.gamma = Schedule::inverse_sqrt(gamma);
    } else {
        r.fail("gamma_schedule", "expected constant|inverse_sqrt, got '" + gamma_sched + "'");
    }

    r.number("u", cfg.u, 0.0, 1e6, true, false);
    if (have_variant && variant == Variant::unified_momentum && cfg.u < 1.0 - cfg.beta1) {
        std::ostringstream msg;
        msg << "must be >= 1 - beta1 = " << (1.0 - cfg.beta1) << ", got " << cfg.u;
        r.fail("u", msg.str());
    }

    if (auto s = r.str("weight_decay")) {
        const std::string w = lower(*s);
        if (w == "none") cfg.weight_decay = WeightDecayMode::none;
        else if (w == "coupled") cfg.weight_decay = WeightDecayMode::coupled;
        else if (w == "decoupled") cfg.weight_decay = WeightDecayMode::decoupled;
        else r.fail("weight_decay", "expected none|coupled|decoupled, got '" + *s + "'");
    }
    r.number("lambda", cfg.lambda, 0.0, 1e12, false, false);
    r.number("clip_norm", cfg.clip_norm, 0.0, 1e12, false, false);
    r.boolean("frozen", cfg.frozen);
    r.boolean("adam_filtered_v", cfg.adam_filtered_second_moment);
    r.boolean("division_free", cfg.division_free_gain);
    r.report_unknown_keys();

    // Safety net: anything the per-key checks above missed still surfaces as
    // a config-time violation rather than a first-step exception.
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        violations.push_back("[optimizer] (" + named.name + "): " + e.what());
    }
    named.config = std::move(cfg);
    return named;
}

RunSpec build_run(const RawSection& raw, const ObjectiveSpec& obj, bool have_objective,
                  std::vector<std::string>& violations) {
    SectionReader r(raw, violations);
    RunSpec run;

    if (!r.has("steps")) r.fail("steps", "missing required key");
    r.natural("steps", run.steps, 1);

    auto seeds = r.str("seeds");
    if (!seeds) {
        r.fail("seeds", "missing required key");
    } else {
        for (const std::string& piece : split_commas(*seeds)) {
            std::uint64_t v = 0;
            if (!parse_u64_str(piece, v)) {
                r.fail("seeds", "expected comma-separated nonnegative integers, got '" + piece +
                                    "'");
                run.seeds.clear();
                break;
            }
            run.seeds.push_back(v);
        }
        for (std::size_t i = 0; i + 1 < run.seeds.size(); ++i)
            for (std::size_t j = i + 1; j < run.seeds.size(); ++j)
                if (run.seeds[i] == run.seeds[j]) {
                    r.fail("seeds", "duplicate seed " + std::to_string(run.seeds[i]));
                    j = run.seeds.size();
                    i = j;
                }
    }

    if (auto s = r.str("theta0")) {
        Vector t0;
        bool ok = true;
        for (const std::string& piece : split_commas(*s)) {
            double v = 0.0;
            if (!parse_double_str(piece, v)) {
                r.fail("theta0", "expected comma-separated finite numbers, got '" + piece + "'");
                ok = false;
                break;
            }
            t0.push_back(v);
        }
        if (ok && have_objective) {
            const std::size_t want = obj.kind == ObjectiveKind::rosenbrock ? 2 : obj.dim;
            if (t0.size() != want) {
                r.fail("theta0", "expected " + std::to_string(want) + " components for this "
                                 "objective, got " + std::to_string(t0.size()));
                ok = false;
            }
        }
        if (ok) run.theta0 = std::move(t0);
    }

    r.natural("record_every", run.record_every, 1);
    if (auto s = r.str("out_dir")) {
        if (s->empty()) r.fail("out_dir", "must be nonempty");
        else run.out_dir = *s;
    }
    r.boolean("svg", run.svg);
    r.report_unknown_keys();
    return run;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

std::string ConfigError::join(const std::vector<std::string>& v) {
    std::string out = "configuration invalid (" + std::to_string(v.size()) + " violation" +
                      (v.size() == 1 ? "" : "s") + "):";
    for (const std::string& s : v) out += "\n  - " + s;
    return out;
}

const char* objective_kind_name(ObjectiveKind k) {
    switch (k) {
        case ObjectiveKind::quadratic: return "quadratic";
        case ObjectiveKind::rosenbrock: return "rosenbrock";
        case ObjectiveKind::constant: return "constant";
        case ObjectiveKind::logistic: return "logistic";
    }
    return "?";
}

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::sgd: return "sgd";
        case Variant::unified_momentum: return "unified_momentum";
        case Variant::sgdf: return "sgdf";
        case Variant::filter_adam: return "filter_adam";
        case Variant::sign_sgdf: return "sign_sgdf";
    }
    return "?";
}

ExperimentConfig parse_config(const std::string& text) {
    std::vector<std::string> violations;
    std::vector<RawSection> sections;
    RawSection* current = nullptr;

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // strip comments ('#' or ';' to end of line)
        const std::size_t cut = line.find_first_of("#;");
        if (cut != std::string::npos) line.erase(cut);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                violations.push_back("line " + std::to_string(line_no) +
                                     ": malformed section header '" + line + "'");
                current = nullptr;
                continue;
            }
            const std::string name = lower(trim(line.substr(1, line.size() - 2)));
            if (name != "objective" && name != "optimizer" && name != "run") {
                violations.push_back("line " + std::to_string(line_no) + ": unknown section [" +
                                     name + "] (expected objective, optimizer or run)");
                current = nullptr;
                continue;
            }
            sections.push_back(RawSection{name, line_no, {}});
            current = &sections.back();
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            violations.push_back("line " + std::to_string(line_no) +
                                 ": expected 'key = value', got '" + line + "'");
            continue;
        }
        if (current == nullptr) {
            violations.push_back("line " + std::to_string(line_no) +
                                 ": key outside any [section]");
            continue;
        }
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            violations.push_back("line " + std::to_string(line_no) + ": empty key");
            continue;
        }
        current->entries.emplace_back(key, value);
    }

    ExperimentConfig cfg;
    bool have_objective = false, have_run = false;
    std::size_t n_objective = 0;
    for (const RawSection& s : sections) {
        if (s.name == "objective") {
            ++n_objective;
            if (n_objective > 1) {
                violations.push_back("line " + std::to_string(s.line) +
                                     ": only one [objective] section is allowed");
                continue;
            }
            cfg.objective = build_objective(s, violations);
            have_objective = true;
        } else if (s.name == "optimizer") {
            cfg.optimizers.push_back(build_optimizer(s, violations));
        } else {  // run
            if (have_run) {
                violations.push_back("line " + std::to_string(s.line) +
                                     ": only one [run] section is allowed");
                continue;
            }
            cfg.run = build_run(s, cfg.objective, have_objective, violations);
            have_run = true;
        }
    }

    if (!have_objective) violations.push_back("[objective] kind: missing required key");
    if (cfg.optimizers.empty()) violations.push_back("[optimizer] variant: missing required key");
    if (!have_run) {
        violations.push_back("[run] steps: missing required key");
        violations.push_back("[run] seeds: missing required key");
    }

    for (std::size_t i = 0; i + 1 < cfg.optimizers.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.optimizers.size(); ++j)
            if (cfg.optimizers[i].name == cfg.optimizers[j].name)
                violations.push_back("[optimizer] name: duplicate name '" +
                                     cfg.optimizers[i].name +
                                     "' (labels must be unique; set name = ... to distinguish)");

    if (!violations.empty()) throw ConfigError(std::move(violations));
    return cfg;
}

ObjectivePtr make_objective(const ObjectiveSpec& spec) {
    switch (spec.kind) {
        case ObjectiveKind::quadratic:
            return noisy_quadratic(spec.dim, spec.kappa, spec.sigma);
        case ObjectiveKind::rosenbrock:
            return rosenbrock(spec.sigma);
        case ObjectiveKind::constant:
            return constant_grad_stream(Vector(spec.dim, spec.value), spec.sigma);
        case ObjectiveKind::logistic: {
            SyntheticDataset data =
                make_two_blob_dataset(spec.n, spec.dim, spec.margin, spec.data_seed);
            return logistic_objective(std::move(data), spec.batch);
        }
    }
    throw std::invalid_argument("make_objective: unknown kind");
}

Vector default_theta0(const ObjectiveSpec& spec) {
    switch (spec.kind) {
        case ObjectiveKind::quadratic:
        case ObjectiveKind::constant:
            return Vector(spec.dim, 1.0);
        case ObjectiveKind::rosenbrock:
            return Vector{-1.2, 1.0};
        case ObjectiveKind::logistic:
            return Vector(spec.dim, 0.0);
    }
    throw std::invalid_argument("default_theta0: unknown kind");
}

}  // namespace sgdf
