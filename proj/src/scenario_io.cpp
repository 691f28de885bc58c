#include "rti/scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace rti {

namespace {

using nlohmann::json;

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
    throw SimError(ErrorCode::SchemaError, what + " at " + path, path);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) schema_fail(path + "." + it.key(), "unknown key");
    }
}

const json& require(const json& obj, const std::string& path, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) schema_fail(path + "." + key, "missing required key");
    return *it;
}

const json* optional_key(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) schema_fail(path, "expected a number");
    return v.get<double>();
}

std::int64_t as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) schema_fail(path, "expected an integer");
    return v.get<std::int64_t>();
}

std::uint64_t as_uint(const json& v, const std::string& path) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                   v.get<std::int64_t>() < 0)) {
        schema_fail(path, "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) schema_fail(path, "expected a string");
    return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& path) {
    if (!v.is_array()) schema_fail(path, "expected an array");
    return v;
}

const json& as_object(const json& v, const std::string& path) {
    if (!v.is_object()) schema_fail(path, "expected an object");
    return v;
}

std::string item(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

std::vector<double> parse_levels(const json& v, const std::string& path) {
    const json& arr = as_array(v, path);
    std::vector<double> levels;
    levels.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        levels.push_back(as_number(arr[i], item(path, i)));
    }
    return levels;
}

std::vector<TransitionPair> parse_allowed(const json& v, const std::string& path) {
    const json& arr = as_array(v, path);
    std::vector<TransitionPair> pairs;
    pairs.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string ipath = item(path, i);
        const json& pair = as_array(arr[i], ipath);
        if (pair.size() != 2) schema_fail(ipath, "expected a [from, to] pair");
        pairs.push_back({static_cast<int>(as_int(pair[0], ipath + "[0]")),
                         static_cast<int>(as_int(pair[1], ipath + "[1]"))});
    }
    return pairs;
}

std::vector<double> parse_matrix_elements(const json& v, const std::string& path,
                                          const std::vector<TransitionPair>& allowed) {
    const json& obj = as_object(v, path);
    std::vector<double> elements(allowed.size(), 1.0);
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string kpath = path + "." + it.key();
        const std::string& key = it.key();
        const std::size_t dash = key.find('-');
        int from = 0;
        int to = 0;
        bool ok = dash != std::string::npos && dash > 0 && dash + 1 < key.size();
        if (ok) {
            const auto r1 = std::from_chars(key.data(), key.data() + dash, from);
            const auto r2 =
                std::from_chars(key.data() + dash + 1, key.data() + key.size(), to);
            ok = r1.ec == std::errc{} && r1.ptr == key.data() + dash && r2.ec == std::errc{} &&
                 r2.ptr == key.data() + key.size();
        }
        if (!ok) schema_fail(kpath, "expected a \"from-to\" transition key");
        const auto pos = std::find(allowed.begin(), allowed.end(), TransitionPair{from, to});
        if (pos == allowed.end()) {
            schema_fail(kpath, "matrix element for a transition not in \"allowed\"");
        }
        elements[static_cast<std::size_t>(pos - allowed.begin())] = as_number(*it, kpath);
    }
    return elements;
}

std::int64_t parse_activation(const json& obj, const std::string& path) {
    if (const json* v = optional_key(obj, "activation_tick")) {
        const std::int64_t t = as_int(*v, path + ".activation_tick");
        if (t < 0) schema_fail(path + ".activation_tick", "expected a nonnegative integer");
        return t;
    }
    return 0;
}

} // namespace

Scenario parse_scenario(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SimError(ErrorCode::SchemaError, std::string("invalid JSON: ") + e.what(), "$");
    }
    if (!root.is_object()) schema_fail("$", "expected a JSON object");
    check_keys(root, "$",
               {"alpha", "energy_tol", "max_ticks", "seed", "channels", "emitters", "absorbers",
                "detectors"});

    Scenario s;
    if (const json* v = optional_key(root, "alpha")) s.alpha = as_number(*v, "$.alpha");
    if (const json* v = optional_key(root, "energy_tol")) {
        s.energy_tol = as_number(*v, "$.energy_tol");
    }
    s.max_ticks = as_int(require(root, "$", "max_ticks"), "$.max_ticks");
    if (const json* v = optional_key(root, "seed")) {
        s.seed = as_uint(*v, "$.seed");
        s.seed_explicit = true;
    }

    const json& channels = as_array(require(root, "$", "channels"), "$.channels");
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const std::string path = item("$.channels", i);
        const json& ch = as_object(channels[i], path);
        check_keys(ch, path, {"id", "label", "re", "im"});
        Channel out;
        out.id = as_string(require(ch, path, "id"), path + ".id");
        out.label = as_string(require(ch, path, "label"), path + ".label");
        out.amplitude = {as_number(require(ch, path, "re"), path + ".re"),
                         as_number(require(ch, path, "im"), path + ".im")};
        s.channels.push_back(std::move(out));
    }

    const json& emitters = as_array(require(root, "$", "emitters"), "$.emitters");
    for (std::size_t i = 0; i < emitters.size(); ++i) {
        const std::string path = item("$.emitters", i);
        const json& e = as_object(emitters[i], path);
        check_keys(e, path, {"id", "levels", "allowed", "matrix_elements", "initial_level"});
        EmitterState out;
        out.id = as_string(require(e, path, "id"), path + ".id");
        auto levels = parse_levels(require(e, path, "levels"), path + ".levels");
        auto allowed = parse_allowed(require(e, path, "allowed"), path + ".allowed");
        std::vector<double> elements(allowed.size(), 1.0);
        if (e.contains("matrix_elements")) {
            elements = parse_matrix_elements(e["matrix_elements"],
                                             path + ".matrix_elements", allowed);
        }
        out.spec = BoundStateSpec::make(std::move(levels), std::move(allowed),
                                        std::move(elements));
        out.current_level =
            static_cast<int>(as_int(require(e, path, "initial_level"), path + ".initial_level"));
        s.emitters.push_back(std::move(out));
    }

    const json empty_array = json::array();
    const json* absorbers_key = optional_key(root, "absorbers");
    const json& absorbers =
        absorbers_key ? as_array(*absorbers_key, "$.absorbers") : empty_array;
    for (std::size_t i = 0; i < absorbers.size(); ++i) {
        const std::string path = item("$.absorbers", i);
        const json& a = as_object(absorbers[i], path);
        check_keys(a, path,
                   {"id", "channel", "levels", "allowed", "initial_level", "activation_tick"});
        AbsorberState out;
        out.id = as_string(require(a, path, "id"), path + ".id");
        out.channel = as_string(require(a, path, "channel"), path + ".channel");
        auto levels = parse_levels(require(a, path, "levels"), path + ".levels");
        auto allowed = parse_allowed(require(a, path, "allowed"), path + ".allowed");
        out.spec = BoundStateSpec::make(std::move(levels), std::move(allowed));
        out.current_level =
            static_cast<int>(as_int(require(a, path, "initial_level"), path + ".initial_level"));
        out.activation_tick = parse_activation(a, path);
        s.absorbers.push_back(std::move(out));
    }

    if (const json* detectors = optional_key(root, "detectors")) {
        const json& arr = as_array(*detectors, "$.detectors");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = item("$.detectors", i);
            const json& d = as_object(arr[i], path);
            check_keys(d, path, {"id", "channel", "n", "gap", "activation_tick"});
            DetectorSpec out;
            out.id = as_string(require(d, path, "id"), path + ".id");
            out.channel = as_string(require(d, path, "channel"), path + ".channel");
            const json& n = require(d, path, "n");
            try {
                if (n.is_string()) {
                    out.n = BigCount::parse(n.get<std::string>());
                } else {
                    out.n = BigCount{as_uint(n, path + ".n")};
                }
            } catch (const SimError& err) {
                if (err.code() != ErrorCode::InvalidCount) throw;
                schema_fail(path + ".n", err.what());
            }
            out.gap = as_number(require(d, path, "gap"), path + ".gap");
            out.activation_tick = parse_activation(d, path);
            s.detectors.push_back(std::move(out));
        }
    }

    // Normalize amplitudes here so a parsed scenario is ready to run and
    // serialization round-trips to the identical value (already-normal
    // totals are left untouched rather than rescaled by 1/sqrt(1+ulp)).
    double total = 0.0;
    for (const auto& ch : s.channels) total += std::norm(ch.amplitude);
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw SimError(ErrorCode::NormalizationError,
                       "channel amplitudes have zero total weight");
    }
    if (std::abs(total - 1.0) > 1e-12) {
        const double scale = 1.0 / std::sqrt(total);
        for (auto& ch : s.channels) ch.amplitude *= scale;
    }

    s.validate();
    return s;
}

std::string serialize_scenario(const Scenario& s) {
    json root;
    root["alpha"] = s.alpha;
    root["energy_tol"] = s.energy_tol;
    root["max_ticks"] = s.max_ticks;
    root["seed"] = s.seed;

    json channels = json::array();
    for (const auto& ch : s.channels) {
        channels.push_back(
            {{"id", ch.id}, {"label", ch.label}, {"re", ch.amplitude.real()},
             {"im", ch.amplitude.imag()}});
    }
    root["channels"] = std::move(channels);

    auto spec_to_json = [](const BoundStateSpec& spec, json& out) {
        json levels = json::array();
        for (const auto& lvl : spec.levels) levels.push_back(lvl.energy);
        out["levels"] = std::move(levels);
        json allowed = json::array();
        for (const auto& pair : spec.allowed) allowed.push_back({pair.from, pair.to});
        out["allowed"] = std::move(allowed);
    };

    json emitters = json::array();
    for (const auto& e : s.emitters) {
        json out;
        out["id"] = e.id;
        spec_to_json(e.spec, out);
        json elements = json::object();
        for (std::size_t i = 0; i < e.spec.allowed.size(); ++i) {
            const auto& pair = e.spec.allowed[i];
            elements[std::to_string(pair.from) + "-" + std::to_string(pair.to)] =
                e.spec.matrix_elements[i];
        }
        out["matrix_elements"] = std::move(elements);
        out["initial_level"] = e.current_level;
        emitters.push_back(std::move(out));
    }
    root["emitters"] = std::move(emitters);

    json absorbers = json::array();
    for (const auto& a : s.absorbers) {
        json out;
        out["id"] = a.id;
        out["channel"] = a.channel;
        spec_to_json(a.spec, out);
        out["initial_level"] = a.current_level;
        if (a.activation_tick != 0) out["activation_tick"] = a.activation_tick;
        absorbers.push_back(std::move(out));
    }
    root["absorbers"] = std::move(absorbers);

    if (!s.detectors.empty()) {
        json detectors = json::array();
        for (const auto& d : s.detectors) {
            json out;
            out["id"] = d.id;
            out["channel"] = d.channel;
            if (d.n.fits_u64()) {
                out["n"] = d.n.as_u64();
            } else {
                out["n"] = d.n.text();
            }
            out["gap"] = d.gap;
            if (d.activation_tick != 0) out["activation_tick"] = d.activation_tick;
            detectors.push_back(std::move(out));
        }
        root["detectors"] = std::move(detectors);
    }
    return root.dump(2) + "\n";
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SimError(ErrorCode::IoError, "cannot open scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw SimError(ErrorCode::IoError, "cannot read scenario file '" + path + "'");
    return parse_scenario(buffer.str());
}

std::string stats_json(const EnsembleStats& stats) {
    json root;
    root["runs"] = stats.runs;
    root["detected"] = stats.detected;
    root["no_detection"] = stats.no_detection;
    if (stats.mean_ticks_to_transaction) {
        root["mean_ticks_to_transaction"] = *stats.mean_ticks_to_transaction;
    } else {
        root["mean_ticks_to_transaction"] = nullptr;
    }
    json channels = json::object();
    for (const auto& [id, tally] : stats.channels) {
        channels[id] = {{"detections", tally.detections}, {"frequency", tally.frequency}};
    }
    root["channels"] = std::move(channels);
    json absorbers = json::object();
    for (const auto& [id, tally] : stats.absorbers) {
        absorbers[id] = {{"detections", tally.detections},
                         {"frequency", tally.frequency},
                         {"nulls", tally.nulls}};
    }
    root["absorbers"] = std::move(absorbers);
    return root.dump(2) + "\n";
}

std::string detections_csv(const EnsembleResult& result) {
    std::ostringstream out;
    out << "run,tick,channel,absorber_id,is_null\n";
    for (const RunRecord& rec : result.records) {
        if (rec.detection) {
            out << rec.run << ',' << rec.detection->tick << ',' << rec.detection->channel_id
                << ',' << rec.detection->winner_id << ",0\n";
        }
        for (const auto& null : rec.nulls) {
            out << rec.run << ',' << null.tick << ',' << null.channel_id << ','
                << null.absorber_id << ",1\n";
        }
    }
    return out.str();
}

std::string error_json(const SimError& err) {
    json root;
    root["error"]["code"] = std::string(to_string(err.code()));
    root["error"]["message"] = err.what();
    if (!err.json_path().empty()) root["error"]["path"] = err.json_path();
    return root.dump() + "\n";
}

std::string rejection_json(const GateRejection& rejection) {
    json root;
    root["rejection"]["rule"] = to_string(rejection.rule);
    root["rejection"]["message"] = rejection.message;
    return root.dump() + "\n";
}

void write_file(const std::string& path, std::string_view content) {
    const std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) {
            throw SimError(ErrorCode::IoError,
                           "cannot create directory '" + p.parent_path().string() + "'");
        }
    }
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw SimError(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw SimError(ErrorCode::IoError, "cannot write '" + path + "'");
}

} // namespace rti
