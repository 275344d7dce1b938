#include "nlclaw/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace nlclaw {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        else if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

int levenshtein(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

struct Value {
    enum class Kind { number, string, boolean, array };
    Kind kind = Kind::number;
    double num = 0.0;
    std::string str;
    bool b = false;
    std::vector<double> nums;    // numeric array
    std::vector<std::string> strs;  // string array
};

const std::map<std::string, std::vector<std::string>> kSchema = {
    {"", {"seed", "preset", "tv_bound_uses", "ode_constant"}},
    {"grid", {"dim", "n", "length"}},
    {"kernel", {"type", "sigma", "half_width", "path", "path_x", "path_y"}},
    {"mobility", {"type", "coeffs", "m", "alpha"}},
    {"problem", {"epsilon", "horizon", "cfl_advection", "cfl_diffusion",
                 "blowup_threshold", "support_fraction"}},
    {"u0", {"type", "value", "mean", "amplitude", "frequency", "left", "right",
            "interface", "width", "center", "baseline", "path"}},
    {"output", {"dir", "times", "count", "write_snapshots"}},
    {"rate_study", {"epsilons", "horizon"}},
    {"stability", {"horizon"}},
    {"lemmas", {"trials", "size"}},
    {"kuznetsov", {"delta", "eta", "epsilon_viscous", "snapshots", "horizon"}},
    {"picard", {"t_short", "iterations", "substeps"}},
    {"bounds", {"horizon", "count"}},
};

// Misspellings that deserve a pointed suggestion regardless of edit distance.
const std::map<std::string, std::string> kAliases = {
    {"viscocity", "epsilon"},
    {"viscosity", "epsilon"},
};

struct Ctx {
    std::vector<ConfigError>* errs;
    void err(int line, const std::string& key, const std::string& msg) const {
        errs->push_back({line, key, msg});
    }
};

bool parse_scalar(const std::string& tok, Value& out) {
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
        out.kind = Value::Kind::string;
        out.str = tok.substr(1, tok.size() - 2);
        return true;
    }
    if (tok == "true" || tok == "false") {
        out.kind = Value::Kind::boolean;
        out.b = tok == "true";
        return true;
    }
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != nullptr && *end == '\0' && end != tok.c_str()) {
        out.kind = Value::Kind::number;
        out.num = v;
        return true;
    }
    return false;
}

bool parse_value(const std::string& raw, int line, const std::string& key,
                 const Ctx& ctx, Value& out) {
    const std::string v = trim(raw);
    if (v.empty()) {
        ctx.err(line, key, "missing value");
        return false;
    }
    if (v.front() == '[') {
        if (v.back() != ']') {
            ctx.err(line, key, "unterminated array");
            return false;
        }
        out.kind = Value::Kind::array;
        const std::string body = v.substr(1, v.size() - 2);
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::string t = trim(item);
            if (t.empty()) continue;
            Value s;
            if (!parse_scalar(t, s)) {
                ctx.err(line, key, "unreadable array element '" + t + "'");
                return false;
            }
            if (s.kind == Value::Kind::number) out.nums.push_back(s.num);
            else if (s.kind == Value::Kind::string) out.strs.push_back(s.str);
            else {
                ctx.err(line, key, "unsupported array element type");
                return false;
            }
        }
        return true;
    }
    if (!parse_scalar(v, out)) {
        ctx.err(line, key, "unreadable value '" + v + "'");
        return false;
    }
    return true;
}

bool want_number(const Value& v, int line, const std::string& key, const Ctx& ctx,
                 double& out) {
    if (v.kind != Value::Kind::number) {
        ctx.err(line, key, "expected a number");
        return false;
    }
    out = v.num;
    return true;
}

bool want_int(const Value& v, int line, const std::string& key, const Ctx& ctx,
              long long& out) {
    double d;
    if (!want_number(v, line, key, ctx, d)) return false;
    if (std::abs(d - std::llround(d)) > 1e-9) {
        ctx.err(line, key, "expected an integer");
        return false;
    }
    out = std::llround(d);
    return true;
}

bool want_string(const Value& v, int line, const std::string& key, const Ctx& ctx,
                 std::string& out) {
    if (v.kind != Value::Kind::string) {
        ctx.err(line, key, "expected a quoted string");
        return false;
    }
    out = v.str;
    return true;
}

std::string dashes_to_underscores(std::string s) {
    std::replace(s.begin(), s.end(), '-', '_');
    return s;
}

void check_file_exists(const std::string& path, int line, const std::string& key,
                       const Ctx& ctx) {
    if (!std::filesystem::exists(path))
        ctx.err(line, key, "referenced file '" + path + "' does not exist");
}

}  // namespace

ParsedConfig parse_config(const std::string& path) {
    ParsedConfig out;
    Ctx ctx{&out.errors};
    RunConfig& cfg = out.config;

    std::ifstream in(path);
    if (!in) {
        ctx.err(0, "", "cannot open config file '" + path + "'");
        return out;
    }

    std::string section;
    std::string raw_line;
    int line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw_line));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                ctx.err(line_no, "", "malformed section header '" + line + "'");
                continue;
            }
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (kSchema.find(name) == kSchema.end() || name.empty()) {
                ctx.err(line_no, name, "unknown section [" + name + "]");
                section = "!";  // swallow keys of the unknown section
            } else {
                section = name;
            }
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            ctx.err(line_no, "", "expected 'key = value', got '" + line + "'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        if (section == "!") continue;

        const auto& known = kSchema.at(section);
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            std::string msg = "unknown key '" + key + "'";
            if (!section.empty()) msg += " in [" + section + "]";
            const auto alias = kAliases.find(key);
            if (alias != kAliases.end()) {
                msg += "; did you mean '" + alias->second + "'?";
            } else {
                std::string best;
                int best_d = 4;
                for (const auto& [sec, keys] : kSchema)
                    for (const std::string& k : keys) {
                        const int d = levenshtein(key, k);
                        if (d < best_d) {
                            best_d = d;
                            best = k;
                        }
                    }
                if (!best.empty()) msg += "; did you mean '" + best + "'?";
            }
            ctx.err(line_no, key, msg);
            continue;
        }

        Value v;
        if (!parse_value(line.substr(eq + 1), line_no, key, ctx, v)) continue;

        double d = 0.0;
        long long i = 0;
        std::string s;

        if (section.empty()) {
            if (key == "seed") {
                if (want_int(v, line_no, key, ctx, i)) {
                    if (i < 0) ctx.err(line_no, key, "seed must be nonnegative");
                    else cfg.seed = static_cast<std::uint64_t>(i);
                }
            } else if (key == "preset") {
                if (want_string(v, line_no, key, ctx, s)) {
                    if (s != "hks" && s != "cgv")
                        ctx.err(line_no, key, "preset must be \"hks\" or \"cgv\"");
                    else cfg.preset = s;
                }
            } else if (key == "tv_bound_uses") {
                if (want_string(v, line_no, key, ctx, s)) {
                    if (s != "full" && s != "divergence" && s != "gradient")
                        ctx.err(line_no, key,
                                "tv_bound_uses must be \"full\", \"divergence\" or \"gradient\"");
                    else cfg.tv_bound_uses = s;
                }
            } else if (key == "ode_constant") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d > 0.0)) ctx.err(line_no, key, "ode_constant must be positive");
                    else cfg.ode_constant = d;
                }
            }
        } else if (section == "grid") {
            if (key == "dim") {
                if (want_int(v, line_no, key, ctx, i)) {
                    if (i != 1 && i != 2) ctx.err(line_no, key, "dim must be 1 or 2");
                    else cfg.grid.dim = static_cast<int>(i);
                }
            } else if (key == "n") {
                if (want_int(v, line_no, key, ctx, i)) {
                    if (i < 8) ctx.err(line_no, key, "n must be at least 8");
                    else cfg.grid.n = static_cast<int>(i);
                }
            } else if (key == "length") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d > 0.0)) ctx.err(line_no, key, "length must be positive");
                    else cfg.grid.length = d;
                }
            }
        } else if (section == "kernel") {
            if (key == "type") {
                if (want_string(v, line_no, key, ctx, s)) {
                    const std::string t = dashes_to_underscores(s);
                    if (t == "hks") cfg.kernel.type = KernelSpec::Type::hks;
                    else if (t == "cgv") cfg.kernel.type = KernelSpec::Type::cgv;
                    else if (t == "gaussian_gradient")
                        cfg.kernel.type = KernelSpec::Type::gaussian_gradient;
                    else if (t == "box") cfg.kernel.type = KernelSpec::Type::box;
                    else if (t == "file") cfg.kernel.type = KernelSpec::Type::file;
                    else
                        ctx.err(line_no, key,
                                "kernel type must be one of hks, cgv, gaussian-gradient, box, file");
                }
            } else if (key == "sigma") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d > 0.0)) ctx.err(line_no, key, "sigma must be positive");
                    else cfg.kernel.sigma = d;
                }
            } else if (key == "half_width") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d > 0.0)) ctx.err(line_no, key, "half_width must be positive");
                    else cfg.kernel.half_width = d;
                }
            } else if (key == "path" || key == "path_x") {
                if (want_string(v, line_no, key, ctx, s)) {
                    cfg.kernel.path_x = s;
                    check_file_exists(s, line_no, key, ctx);
                }
            } else if (key == "path_y") {
                if (want_string(v, line_no, key, ctx, s)) {
                    cfg.kernel.path_y = s;
                    check_file_exists(s, line_no, key, ctx);
                }
            }
        } else if (section == "mobility") {
            if (key == "type") {
                if (want_string(v, line_no, key, ctx, s)) {
                    const std::string t = dashes_to_underscores(s);
                    if (t == "polynomial") cfg.mobility.type = MobilitySpec::Type::polynomial;
                    else if (t == "power") cfg.mobility.type = MobilitySpec::Type::power;
                    else if (t == "logistic") cfg.mobility.type = MobilitySpec::Type::logistic;
                    else if (t == "logistic_power")
                        cfg.mobility.type = MobilitySpec::Type::logistic_power;
                    else
                        ctx.err(line_no, key,
                                "mobility type must be one of polynomial, power, logistic, logistic-power");
                }
            } else if (key == "coeffs") {
                if (v.kind != Value::Kind::array || !v.strs.empty())
                    ctx.err(line_no, key, "coeffs must be a numeric array");
                else cfg.mobility.coeffs = v.nums;
            } else if (key == "m") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d >= 1.0))
                        ctx.err(line_no, key, "power exponent m must be at least 1");
                    else cfg.mobility.m = d;
                }
            } else if (key == "alpha") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d >= 1.0)) ctx.err(line_no, key, "alpha must be at least 1");
                    else cfg.mobility.alpha = d;
                }
            }
        } else if (section == "problem") {
            if (key == "epsilon") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d >= 0.0)) ctx.err(line_no, key, "epsilon must be nonnegative");
                    else cfg.problem.epsilon = d;
                }
            } else if (key == "horizon") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d >= 0.0)) ctx.err(line_no, key, "horizon must be nonnegative");
                    else cfg.problem.horizon = d;
                }
            } else if (key == "cfl_advection" || key == "cfl_diffusion") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d > 0.0) || !(d <= 1.0))
                        ctx.err(line_no, key, key + " must lie in (0, 1]");
                    else if (key == "cfl_advection") cfg.problem.cfl_advection = d;
                    else cfg.problem.cfl_diffusion = d;
                }
            } else if (key == "blowup_threshold") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d > 0.0)) ctx.err(line_no, key, "blowup_threshold must be positive");
                    else cfg.problem.blowup_threshold = d;
                }
            } else if (key == "support_fraction") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d > 0.0) || !(d <= 1.0))
                        ctx.err(line_no, key, "support_fraction must lie in (0, 1]");
                    else cfg.problem.support_fraction = d;
                }
            }
        } else if (section == "u0") {
            cfg.has_u0 = true;
            if (key == "type") {
                if (want_string(v, line_no, key, ctx, s)) {
                    const std::string t = dashes_to_underscores(s);
                    if (t == "constant") cfg.u0.kind = U0Spec::Kind::constant;
                    else if (t == "sine") cfg.u0.kind = U0Spec::Kind::sine;
                    else if (t == "step") cfg.u0.kind = U0Spec::Kind::step;
                    else if (t == "gaussian_bump") cfg.u0.kind = U0Spec::Kind::gaussian_bump;
                    else if (t == "file") cfg.u0.kind = U0Spec::Kind::file;
                    else
                        ctx.err(line_no, key,
                                "u0 type must be one of constant, sine, step, gaussian-bump, file");
                }
            } else if (key == "value") {
                if (want_number(v, line_no, key, ctx, d)) cfg.u0.value = d;
            } else if (key == "mean") {
                if (want_number(v, line_no, key, ctx, d)) cfg.u0.mean = d;
            } else if (key == "amplitude") {
                if (want_number(v, line_no, key, ctx, d)) {
                    cfg.u0.amplitude = d;
                    cfg.u0.bump_amplitude = d;
                }
            } else if (key == "frequency") {
                if (want_int(v, line_no, key, ctx, i)) {
                    if (i < 1) ctx.err(line_no, key, "frequency must be at least 1");
                    else cfg.u0.frequency = static_cast<int>(i);
                }
            } else if (key == "left") {
                if (want_number(v, line_no, key, ctx, d)) cfg.u0.left = d;
            } else if (key == "right") {
                if (want_number(v, line_no, key, ctx, d)) cfg.u0.right = d;
            } else if (key == "interface") {
                if (want_number(v, line_no, key, ctx, d)) cfg.u0.interface_pos = d;
            } else if (key == "width") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d > 0.0)) ctx.err(line_no, key, "width must be positive");
                    else cfg.u0.width = d;
                }
            } else if (key == "center") {
                if (want_number(v, line_no, key, ctx, d)) cfg.u0.center = d;
            } else if (key == "baseline") {
                if (want_number(v, line_no, key, ctx, d)) cfg.u0.baseline = d;
            } else if (key == "path") {
                if (want_string(v, line_no, key, ctx, s)) {
                    cfg.u0.path = s;
                    check_file_exists(s, line_no, key, ctx);
                }
            }
        } else if (section == "output") {
            if (key == "dir") {
                if (want_string(v, line_no, key, ctx, s)) cfg.output.dir = s;
            } else if (key == "times") {
                if (v.kind != Value::Kind::array || !v.strs.empty()) {
                    ctx.err(line_no, key, "times must be a numeric array");
                } else {
                    bool ok = true;
                    for (std::size_t j = 0; j < v.nums.size(); ++j) {
                        if (!(v.nums[j] >= 0.0) ||
                            (j > 0 && !(v.nums[j] > v.nums[j - 1]))) {
                            ctx.err(line_no, key,
                                    "times must be nonnegative and strictly increasing");
                            ok = false;
                            break;
                        }
                    }
                    if (ok) cfg.output.times = v.nums;
                }
            } else if (key == "count") {
                if (want_int(v, line_no, key, ctx, i)) {
                    if (i < 2) ctx.err(line_no, key, "count must be at least 2");
                    else cfg.output.count = static_cast<int>(i);
                }
            } else if (key == "write_snapshots") {
                if (v.kind != Value::Kind::boolean)
                    ctx.err(line_no, key, "write_snapshots must be true or false");
                else cfg.output.write_snapshots = v.b;
            }
        } else if (section == "rate_study") {
            if (key == "epsilons") {
                if (v.kind != Value::Kind::array || !v.strs.empty()) {
                    ctx.err(line_no, key, "epsilons must be a numeric array");
                } else {
                    bool ok = true;
                    for (std::size_t j = 0; j < v.nums.size(); ++j) {
                        if (!(v.nums[j] > 0.0)) {
                            ctx.err(line_no, key, "epsilons must be positive");
                            ok = false;
                            break;
                        }
                        if (j > 0 && !(v.nums[j] < v.nums[j - 1])) {
                            ctx.err(line_no, key, "epsilons must be strictly decreasing");
                            ok = false;
                            break;
                        }
                    }
                    if (ok) cfg.rate.epsilons = v.nums;
                }
            } else if (key == "horizon") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d > 0.0)) ctx.err(line_no, key, "horizon must be positive");
                    else cfg.rate.horizon = d;
                }
            }
        } else if (section == "stability") {
            if (key == "horizon") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d > 0.0)) ctx.err(line_no, key, "horizon must be positive");
                    else cfg.stability.horizon = d;
                }
            }
        } else if (section == "lemmas") {
            if (key == "trials") {
                if (want_int(v, line_no, key, ctx, i)) {
                    if (i < 1) ctx.err(line_no, key, "trials must be at least 1");
                    else cfg.lemmas.trials = static_cast<int>(i);
                }
            } else if (key == "size") {
                if (want_int(v, line_no, key, ctx, i)) {
                    if (i < 8 || i % 2 != 0)
                        ctx.err(line_no, key, "size must be an even integer >= 8");
                    else cfg.lemmas.size = static_cast<int>(i);
                }
            }
        } else if (section == "kuznetsov") {
            if (key == "delta") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d > 0.0)) ctx.err(line_no, key, "delta must be positive");
                    else cfg.kuznetsov.delta = d;
                }
            } else if (key == "eta") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d > 0.0)) ctx.err(line_no, key, "eta must be positive");
                    else cfg.kuznetsov.eta = d;
                }
            } else if (key == "epsilon_viscous") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d > 0.0)) ctx.err(line_no, key, "epsilon_viscous must be positive");
                    else cfg.kuznetsov.epsilon_viscous = d;
                }
            } else if (key == "snapshots") {
                if (want_int(v, line_no, key, ctx, i)) {
                    if (i < 3 || i > 64)
                        ctx.err(line_no, key, "snapshots must lie in [3, 64]");
                    else cfg.kuznetsov.snapshots = static_cast<int>(i);
                }
            } else if (key == "horizon") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d > 0.0)) ctx.err(line_no, key, "horizon must be positive");
                    else cfg.kuznetsov.horizon = d;
                }
            }
        } else if (section == "picard") {
            if (key == "t_short") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d > 0.0)) ctx.err(line_no, key, "t_short must be positive");
                    else cfg.picard.t_short = d;
                }
            } else if (key == "iterations") {
                if (want_int(v, line_no, key, ctx, i)) {
                    if (i < 2) ctx.err(line_no, key, "iterations must be at least 2");
                    else cfg.picard.iterations = static_cast<int>(i);
                }
            } else if (key == "substeps") {
                if (want_int(v, line_no, key, ctx, i)) {
                    if (i < 2) ctx.err(line_no, key, "substeps must be at least 2");
                    else cfg.picard.substeps = static_cast<int>(i);
                }
            }
        } else if (section == "bounds") {
            if (key == "horizon") {
                if (want_number(v, line_no, key, ctx, d)) {
                    if (!(d > 0.0)) ctx.err(line_no, key, "horizon must be positive");
                    else cfg.bounds.horizon = d;
                }
            } else if (key == "count") {
                if (want_int(v, line_no, key, ctx, i)) {
                    if (i < 2) ctx.err(line_no, key, "count must be at least 2");
                    else cfg.bounds.count = static_cast<int>(i);
                }
            }
        }
    }

    // cross-field checks
    if (cfg.kernel.type == KernelSpec::Type::file && cfg.kernel.path_x.empty())
        ctx.err(0, "kernel.path", "file kernel needs a path");
    if (cfg.kernel.type == KernelSpec::Type::file && cfg.grid.dim == 2 &&
        cfg.kernel.path_y.empty())
        ctx.err(0, "kernel.path_y", "2-d file kernel needs path_y");
    if (cfg.u0.kind == U0Spec::Kind::file && cfg.u0.path.empty())
        ctx.err(0, "u0.path", "file u0 needs a path");
    if (!cfg.output.times.empty() && cfg.output.times.back() > cfg.problem.horizon)
        ctx.err(0, "output.times", "output times exceed the horizon");

    return out;
}

std::string format_errors(const ParsedConfig& parsed, const std::string& path) {
    std::ostringstream os;
    for (const ConfigError& e : parsed.errors) {
        os << path;
        if (e.line > 0) os << ":" << e.line;
        if (!e.key.empty()) os << " (" << e.key << ")";
        os << ": " << e.message << "\n";
    }
    return os.str();
}

std::uint64_t fnv1a_file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open '" + path + "' for hashing");
    std::uint64_t h = 14695981039346656037ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace nlclaw
