#include "sqhet/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "sqhet/errors.hpp"

namespace sqhet {

using json = nlohmann::ordered_json;

namespace {

// Strict reader over one JSON object; remembers which keys were consumed.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    [[nodiscard]] std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out) {
        if (const json* v = find(key)) out = as_number(*v, at(key));
    }

    void optional_number(const std::string& key, std::optional<double>& out) {
        if (const json* v = find(key)) out = v->is_null() ? std::nullopt : std::optional(as_number(*v, at(key)));
    }

    void count(const std::string& key, std::size_t& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer() || v->get<std::int64_t>() < 0)
                throw ConfigError(at(key), "expected a non-negative integer");
            out = v->get<std::size_t>();
        }
    }

    void text(const std::string& key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw ConfigError(at(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) throw ConfigError(at(key), "unknown field");
    }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) throw ConfigError(path, "expected a number");
        return v.get<double>();
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string indexed(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

template <class E, class F>
E parse_enum(const json& v, const std::string& path, F from_string) {
    if (!v.is_string()) throw ConfigError(path, "expected a string");
    try {
        return from_string(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
}

ExperimentKind kind_from_string(const std::string& s) {
    if (s == "spectrum") return ExperimentKind::spectrum;
    if (s == "epr-identity") return ExperimentKind::epr_identity;
    if (s == "pump-sweep") return ExperimentKind::pump_sweep;
    throw std::invalid_argument("unknown experiment kind '" + s + "'");
}

Measurement measurement_from_string(const std::string& s) {
    if (s == "raw") return Measurement::raw;
    if (s == "demod") return Measurement::demod;
    if (s == "demod-no-cross") return Measurement::demod_no_cross;
    throw std::invalid_argument("unknown measurement '" + s + "'");
}

json band_json(const BandSpec& b) {
    return {{"center", b.center}, {"half_width", b.half_width}, {"exclusion_half_width", b.exclusion_half_width}};
}

BandSpec parse_band(const json& j, const std::string& path) {
    Reader r(j, path);
    BandSpec b;
    r.number("center", b.center);
    r.number("half_width", b.half_width);
    r.number("exclusion_half_width", b.exclusion_half_width);
    r.finish();
    return b;
}

json filter_json(const FilterSpec& f) {
    json j{{"kind", to_string(f.kind)}};
    if (f.kind == FilterKind::gain) {
        j["gain_db"] = f.gain_db;
        return j;
    }
    if (f.kind == FilterKind::band_stop)
        j["corners"] = {f.corners[0], f.corners[1]};
    else
        j["corners"] = {f.corners[0]};
    j["order"] = f.order;
    j["ripple_db"] = f.ripple_db;
    return j;
}

FilterSpec parse_filter(const json& j, const std::string& path) {
    Reader r(j, path);
    FilterSpec f;
    const json* kind = r.find("kind");
    if (!kind) throw ConfigError(r.at("kind"), "missing filter kind");
    f.kind = parse_enum<FilterKind>(*kind, r.at("kind"), filter_kind_from_string);
    if (const json* c = r.find("corners")) {
        const std::size_t want = f.kind == FilterKind::band_stop ? 2 : 1;
        if (!c->is_array() || c->size() != want)
            throw ConfigError(r.at("corners"), "expected " + std::to_string(want) + " corner frequencies");
        for (std::size_t i = 0; i < want; ++i) f.corners[i] = Reader::as_number((*c)[i], indexed(r.at("corners"), i));
    } else if (f.kind != FilterKind::gain) {
        throw ConfigError(r.at("corners"), "missing corner frequencies");
    }
    if (const json* o = r.find("order")) {
        if (!o->is_number_integer()) throw ConfigError(r.at("order"), "expected an integer");
        f.order = o->get<int>();
    }
    r.number("ripple_db", f.ripple_db);
    r.number("gain_db", f.gain_db);
    r.finish();
    return f;
}

std::vector<FilterSpec> parse_chain(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of filters");
    std::vector<FilterSpec> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_filter(j[i], indexed(path, i)));
    return out;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void require(bool ok, const std::string& path, const std::string& message) {
    if (!ok) throw ConfigError(path, message);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::spectrum: return "spectrum";
        case ExperimentKind::epr_identity: return "epr-identity";
        case ExperimentKind::pump_sweep: return "pump-sweep";
    }
    return "spectrum";
}

std::string to_string(Measurement m) {
    switch (m) {
        case Measurement::raw: return "raw";
        case Measurement::demod: return "demod";
        case Measurement::demod_no_cross: return "demod-no-cross";
    }
    return "raw";
}

void ExperimentConfig::validate() const {
    require(finite(grid.sample_rate) && grid.sample_rate > 0.0, "grid.sample_rate", "must be > 0");
    require(grid.n_samples >= 16 && grid.n_samples % 2 == 0, "grid.n_samples", "must be even and >= 16");
    require(finite(grid.center_offset) && std::abs(grid.center_offset) < grid.nyquist(), "grid.center_offset",
            "must lie inside (-fs/2, fs/2)");
    require(frames >= 1, "grid.frames", "must be >= 1");

    require(finite(beams.e1) && beams.e1 >= 0.0, "beams.e1", "must be >= 0");
    require(finite(beams.e2) && beams.e2 >= 0.0, "beams.e2", "must be >= 0");
    require(finite(beams.mod_freq) && beams.mod_freq >= 0.0, "beams.mod_freq", "must be >= 0");
    require(finite(beams.mod_depth), "beams.mod_depth", "must be finite");
    require(beams.classical_fraction >= 0.0 && beams.classical_fraction < 1.0, "beams.classical_fraction",
            "must be in [0, 1)");
    require(finite(beams.phase1), "beams.phase1", "must be finite");
    require(finite(beams.phase2), "beams.phase2", "must be finite");
    try {
        static_cast<void>(grid.optical_bin(0.0));
        static_cast<void>(grid.optical_bin(beams.beat_freq));
    } catch (const BandError& e) {
        throw ConfigError("beams.beat_freq", e.what());
    }

    for (std::size_t i = 0; i < 2; ++i) {
        const auto& p = pickoffs[i];
        const std::string base = indexed("pickoffs", i);
        require(p.reflectivity > 0.0 && p.reflectivity <= 1.0, base + ".reflectivity", "must be in (0, 1]");
        require(finite(p.angle_error), base + ".angle_error", "must be finite");
        require(p.jitter_rms >= 0.0 && finite(p.jitter_rms), base + ".jitter_rms", "must be >= 0");
        if (p.squeezer) {
            require(p.squeezer->pump_ratio >= 0.0 && p.squeezer->pump_ratio < 1.0, base + ".squeezer.pump_ratio",
                    "must be in [0, 1) (below threshold)");
            require(p.squeezer->hwhm > 0.0 && finite(p.squeezer->hwhm), base + ".squeezer.hwhm", "must be > 0");
            require(p.squeezer->escape_efficiency >= 0.0 && p.squeezer->escape_efficiency <= 1.0,
                    base + ".squeezer.escape_efficiency", "must be in [0, 1]");
        }
    }

    require(detector.quantum_efficiency > 0.0 && detector.quantum_efficiency <= 1.0, "detector.quantum_efficiency",
            "must be in (0, 1]");
    require(!detector.clip_level || *detector.clip_level > 0.0, "detector.clip_level", "must be > 0");
    require(!detector.electronic_noise_rel_db || finite(*detector.electronic_noise_rel_db),
            "detector.electronic_noise_rel_db", "must be finite");
    require(finite(detector.gain_ripple_db), "detector.gain_ripple_db", "must be finite");

    auto check_chain = [&](const std::vector<FilterSpec>& chain, const std::string& path) {
        for (std::size_t i = 0; i < chain.size(); ++i) {
            try {
                chain[i].validate(grid.sample_rate);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(indexed(path, i), e.what());
            }
        }
    };
    check_chain(dsp.raw_chain, "dsp.raw_chain");
    check_chain(dsp.demod_chain, "dsp.demod_chain");
    require(dsp.decimation >= 1 && grid.n_samples % dsp.decimation == 0 &&
                (grid.n_samples / dsp.decimation) % 2 == 0,
            "dsp.decimation", "must divide n_samples into an even frame length");
    require(!dsp.post_splitter_noise_rel_db || finite(*dsp.post_splitter_noise_rel_db),
            "dsp.post_splitter_noise_rel_db", "must be finite");

    const double analysis_nyquist = measurement == Measurement::raw
                                        ? grid.nyquist()
                                        : grid.nyquist() / static_cast<double>(dsp.decimation);
    auto check_band = [&](const BandSpec& b, const std::string& path) {
        try {
            b.validate();
        } catch (const BandError& e) {
            throw ConfigError(path, e.what());
        }
        require(b.center - b.half_width > 0.0 && b.center + b.half_width < analysis_nyquist, path + ".center",
                "band must lie inside (0, Nyquist) of the analyzed signal");
    };
    if (kind == ExperimentKind::spectrum) {
        require(!bands.empty(), "bands", "at least one analysis band is required");
        for (std::size_t i = 0; i < bands.size(); ++i) {
            require(!bands[i].name.empty(), indexed("bands", i) + ".name", "must not be empty");
            check_band(bands[i].band, indexed("bands", i));
        }
        check_band(normalization_band, "normalization_band");
        if (measurement != Measurement::raw)
            require(std::abs(beams.beat_freq) < 0.5 * grid.nyquist(), "beams.beat_freq",
                    "demodulation needs the beat below Nyquist/2");
    }

    if (kind == ExperimentKind::epr_identity) {
        require(grid.n_samples >= 64, "grid.n_samples", "EPR draws need at least 64 samples");
        require(!epr.pump_ratios.empty(), "epr.pump_ratios", "must not be empty");
        for (std::size_t i = 0; i < epr.pump_ratios.size(); ++i)
            require(epr.pump_ratios[i] >= 0.0 && epr.pump_ratios[i] < 1.0, indexed("epr.pump_ratios", i),
                    "must be in [0, 1)");
        require(epr.hwhm > 0.0, "epr.hwhm", "must be > 0");
        require(epr.variance_frames >= 1, "epr.variance_frames", "must be >= 1");
        require(std::abs(4.0 * beams.beat_freq) < grid.nyquist(), "beams.beat_freq",
                "w0 - W .. w0 + 2W must fit inside the grid");
    }

    if (kind == ExperimentKind::pump_sweep) {
        require(sweep.threshold_mw > 0.0, "sweep.threshold_mw", "must be > 0");
        require(!sweep.pump_mw.empty(), "sweep.pump_mw", "must not be empty");
        for (std::size_t i = 0; i < sweep.pump_mw.size(); ++i)
            require(sweep.pump_mw[i] >= 0.0 && sweep.pump_mw[i] < sweep.threshold_mw, indexed("sweep.pump_mw", i),
                    "must be in [0, threshold)");
        require(sweep.hwhm > 0.0, "sweep.hwhm", "must be > 0");
        require(sweep.escape_efficiency >= 0.0 && sweep.escape_efficiency <= 1.0, "sweep.escape_efficiency",
                "must be in [0, 1]");
        check_band(sweep.summary_band, "sweep.summary_band");
    }
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["description"] = c.description;
    j["kind"] = to_string(c.kind);
    j["grid"] = {{"sample_rate", c.grid.sample_rate},
                 {"n_samples", c.grid.n_samples},
                 {"center_offset", c.grid.center_offset},
                 {"frames", c.frames}};
    j["beams"] = {{"e1", c.beams.e1},
                  {"e2", c.beams.e2},
                  {"beat_freq", c.beams.beat_freq},
                  {"mod_freq", c.beams.mod_freq},
                  {"mod_depth", c.beams.mod_depth},
                  {"classical_fraction", c.beams.classical_fraction},
                  {"phase1", c.beams.phase1},
                  {"phase2", c.beams.phase2}};
    json pick = json::array();
    for (const auto& p : c.pickoffs) {
        json q = nullptr;
        if (p.squeezer)
            q = {{"pump_ratio", p.squeezer->pump_ratio},
                 {"hwhm", p.squeezer->hwhm},
                 {"escape_efficiency", p.squeezer->escape_efficiency}};
        pick.push_back(
            {{"reflectivity", p.reflectivity}, {"squeezer", q}, {"angle_error", p.angle_error}, {"jitter_rms", p.jitter_rms}});
    }
    j["pickoffs"] = pick;
    j["detector"] = {{"quantum_efficiency", c.detector.quantum_efficiency},
                     {"electronic_noise_rel_db", optional_json(c.detector.electronic_noise_rel_db)},
                     {"clip_level", optional_json(c.detector.clip_level)},
                     {"gain_ripple_db", c.detector.gain_ripple_db}};
    j["scheme"] = to_string(c.scheme);
    j["measurement"] = to_string(c.measurement);
    json raw = json::array(), dem = json::array();
    for (const auto& f : c.dsp.raw_chain) raw.push_back(filter_json(f));
    for (const auto& f : c.dsp.demod_chain) dem.push_back(filter_json(f));
    j["dsp"] = {{"raw_chain", raw},
                {"demod_chain", dem},
                {"post_splitter_noise_rel_db", optional_json(c.dsp.post_splitter_noise_rel_db)},
                {"decimation", c.dsp.decimation}};
    json bands = json::array();
    for (const auto& b : c.bands) {
        json e = band_json(b.band);
        e["name"] = b.name;
        bands.push_back(e);
    }
    j["bands"] = bands;
    j["normalization_band"] = band_json(c.normalization_band);
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["epr"] = {{"pump_ratios", c.epr.pump_ratios}, {"hwhm", c.epr.hwhm}, {"variance_frames", c.epr.variance_frames}};
    j["sweep"] = {{"pump_mw", c.sweep.pump_mw},
                  {"threshold_mw", c.sweep.threshold_mw},
                  {"hwhm", c.sweep.hwhm},
                  {"escape_efficiency", c.sweep.escape_efficiency},
                  {"summary_band", band_json(c.sweep.summary_band)}};
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    Reader root(j, "");
    root.text("name", c.name);
    root.text("description", c.description);
    if (const json* v = root.find("kind")) c.kind = parse_enum<ExperimentKind>(*v, "kind", kind_from_string);
    if (const json* v = root.find("grid")) {
        Reader r(*v, "grid");
        r.number("sample_rate", c.grid.sample_rate);
        r.count("n_samples", c.grid.n_samples);
        r.number("center_offset", c.grid.center_offset);
        r.count("frames", c.frames);
        r.finish();
    }
    if (const json* v = root.find("beams")) {
        Reader r(*v, "beams");
        r.number("e1", c.beams.e1);
        r.number("e2", c.beams.e2);
        r.number("beat_freq", c.beams.beat_freq);
        r.number("mod_freq", c.beams.mod_freq);
        r.number("mod_depth", c.beams.mod_depth);
        r.number("classical_fraction", c.beams.classical_fraction);
        r.number("phase1", c.beams.phase1);
        r.number("phase2", c.beams.phase2);
        r.finish();
    }
    if (const json* v = root.find("pickoffs")) {
        if (!v->is_array() || v->size() != 2) throw ConfigError("pickoffs", "expected an array of two pickoffs");
        for (std::size_t i = 0; i < 2; ++i) {
            const std::string base = indexed("pickoffs", i);
            Reader r((*v)[i], base);
            auto& p = c.pickoffs[i];
            r.number("reflectivity", p.reflectivity);
            r.number("angle_error", p.angle_error);
            r.number("jitter_rms", p.jitter_rms);
            if (const json* q = r.find("squeezer")) {
                if (q->is_null()) {
                    p.squeezer.reset();
                } else {
                    Reader rq(*q, base + ".squeezer");
                    SqueezerConfig s = p.squeezer.value_or(SqueezerConfig{});
                    rq.number("pump_ratio", s.pump_ratio);
                    rq.number("hwhm", s.hwhm);
                    rq.number("escape_efficiency", s.escape_efficiency);
                    rq.finish();
                    p.squeezer = s;
                }
            }
            r.finish();
        }
    }
    if (const json* v = root.find("detector")) {
        Reader r(*v, "detector");
        r.number("quantum_efficiency", c.detector.quantum_efficiency);
        r.optional_number("electronic_noise_rel_db", c.detector.electronic_noise_rel_db);
        r.optional_number("clip_level", c.detector.clip_level);
        r.number("gain_ripple_db", c.detector.gain_ripple_db);
        r.finish();
    }
    if (const json* v = root.find("scheme")) c.scheme = parse_enum<Scheme>(*v, "scheme", scheme_from_string);
    if (const json* v = root.find("measurement"))
        c.measurement = parse_enum<Measurement>(*v, "measurement", measurement_from_string);
    if (const json* v = root.find("dsp")) {
        Reader r(*v, "dsp");
        if (const json* ch = r.find("raw_chain")) c.dsp.raw_chain = parse_chain(*ch, "dsp.raw_chain");
        if (const json* ch = r.find("demod_chain")) c.dsp.demod_chain = parse_chain(*ch, "dsp.demod_chain");
        r.optional_number("post_splitter_noise_rel_db", c.dsp.post_splitter_noise_rel_db);
        r.count("decimation", c.dsp.decimation);
        r.finish();
    }
    if (const json* v = root.find("bands")) {
        if (!v->is_array()) throw ConfigError("bands", "expected an array");
        c.bands.clear();
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string base = indexed("bands", i);
            Reader r((*v)[i], base);
            NamedBand b;
            r.text("name", b.name);
            r.number("center", b.band.center);
            r.number("half_width", b.band.half_width);
            r.number("exclusion_half_width", b.band.exclusion_half_width);
            r.finish();
            c.bands.push_back(b);
        }
    }
    if (const json* v = root.find("normalization_band")) c.normalization_band = parse_band(*v, "normalization_band");
    if (const json* v = root.find("seed")) {
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
            throw ConfigError("seed", "expected an unsigned 64-bit integer");
        c.seed = v->get<std::uint64_t>();
    }
    root.text("output_dir", c.output_dir);
    auto number_list = [](const json& v, const std::string& path) {
        if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(Reader::as_number(v[i], indexed(path, i)));
        return out;
    };
    if (const json* v = root.find("epr")) {
        Reader r(*v, "epr");
        if (const json* p = r.find("pump_ratios")) c.epr.pump_ratios = number_list(*p, "epr.pump_ratios");
        r.number("hwhm", c.epr.hwhm);
        r.count("variance_frames", c.epr.variance_frames);
        r.finish();
    }
    if (const json* v = root.find("sweep")) {
        Reader r(*v, "sweep");
        if (const json* p = r.find("pump_mw")) c.sweep.pump_mw = number_list(*p, "sweep.pump_mw");
        r.number("threshold_mw", c.sweep.threshold_mw);
        r.number("hwhm", c.sweep.hwhm);
        r.number("escape_efficiency", c.sweep.escape_efficiency);
        if (const json* b = r.find("summary_band")) c.sweep.summary_band = parse_band(*b, "sweep.summary_band");
        r.finish();
    }
    root.finish();
    c.validate();
    return c;
}

ExperimentConfig merge_config(const ExperimentConfig& base, const json& patch) {
    if (!patch.is_object()) throw ConfigError("<root>", "config patch must be a JSON object");
    json j = to_json(base);
    j.merge_patch(patch);
    return config_from_json(j);
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path, std::string("invalid JSON: ") + e.what());
    }
}

std::string config_hash(const ExperimentConfig& c) {
    json j = to_json(c);
    j.erase("output_dir");
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace sqhet
