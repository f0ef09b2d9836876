#include "sqhet/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "sqhet/demod.hpp"
#include "sqhet/errors.hpp"
#include "sqhet/field.hpp"
#include "sqhet/filters.hpp"

namespace sqhet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_double(double v, const char* spec = "%.6f") {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string fmt_mw(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%03.0f", p);
    return buf;
}

std::optional<SqueezerSpec> squeezer_spec(const PickoffConfig& p) {
    if (!p.squeezer) return std::nullopt;
    SqueezerSpec s;
    s.pump_ratio = p.squeezer->pump_ratio;
    s.hwhm = p.squeezer->hwhm;
    s.escape_efficiency = p.squeezer->escape_efficiency;
    return s;
}

double lo_phase(const ExperimentConfig& c) { return c.beams.phase2 - c.beams.phase1 + 0.5 * std::numbers::pi; }

// Accumulates per-frame spectra computed in parallel, added in frame order.
SpectrumEstimate accumulate(std::size_t frames, std::size_t workers, SpectrumAccumulator acc,
                            const std::function<std::vector<double>(std::size_t)>& frame_spectrum) {
    const std::size_t block = std::max<std::size_t>(1, workers) * 16;
    std::vector<std::vector<double>> out;
    for (std::size_t start = 0; start < frames; start += block) {
        const std::size_t count = std::min(block, frames - start);
        out.assign(count, {});
        parallel_for(count, workers, [&](std::size_t i) { out[i] = frame_spectrum(start + i); });
        for (const auto& p : out) acc.add_periodogram(p);
    }
    return acc.result();
}

PhotocurrentTrace dark_frame(const InterferometerSetup& setup, RngKey key, std::size_t frame) {
    FieldRealization dark(setup.grid, "dark");
    DetectorSpec det = setup.detector;
    det.quantum_efficiency = 1.0;
    auto trace = balanced_detect(dark, dark, det, key);
    trace.frame_index = frame;
    return trace;
}

struct Weighted {
    double freq;
    double weight;
};

NoiseBudget weighted_budget(const ExperimentConfig& c, const std::vector<Weighted>& points) {
    const double f = c.measurement == Measurement::raw ? raw_classical_fraction(c.beams.classical_fraction)
                                                       : c.beams.classical_fraction;
    const double independent = c.measurement == Measurement::demod_no_cross && c.dsp.post_splitter_noise_rel_db
                                   ? from_db(*c.dsp.post_splitter_noise_rel_db)
                                   : 0.0;
    NoiseBudget acc;
    acc.scheme = c.scheme;
    acc.floor = 0.0;
    double wsum = 0.0;
    for (const auto& pt : points) {
        std::array<SourceTerm, 2> src;
        for (std::size_t i = 0; i < 2; ++i) {
            const auto& p = c.pickoffs[i];
            src[i].weight = i == 0 ? c.beams.e2 * c.beams.e2 : c.beams.e1 * c.beams.e1;
            const auto spec = squeezer_spec(p);
            if (spec && c.scheme != Scheme::unsqueezed) src[i].powers = opo_squeezing_spectrum(*spec, pt.freq);
            src[i].efficiency = p.reflectivity * c.detector.quantum_efficiency;
            src[i].angle_error = p.angle_error;
            src[i].jitter_rms = p.jitter_rms;
        }
        const NoiseBudget b = c.scheme == Scheme::straightforward ? straightforward_budget(src, f, independent)
                                                                  : proposed_budget(src, f, independent);
        acc.floor += pt.weight * b.floor;
        acc.squeezed += pt.weight * b.squeezed;
        acc.antisqueezed += pt.weight * b.antisqueezed;
        acc.loss_vacuum += pt.weight * b.loss_vacuum;
        acc.classical += pt.weight * b.classical;
        acc.electronic += pt.weight * b.electronic;
        wsum += pt.weight;
    }
    for (double* v : {&acc.floor, &acc.squeezed, &acc.antisqueezed, &acc.loss_vacuum, &acc.classical, &acc.electronic})
        *v /= wsum;
    return acc;
}

OutputTable spectrum_table(const std::string& file, const SpectrumEstimate& s, const SpectrumEstimate* background,
                           double norm, const std::vector<std::string>& comments) {
    OutputTable t{file, comments, {"freq_hz", "psd_db_rel_vacuum"}, {}};
    for (std::size_t k = 0; k < s.freqs.size(); ++k) {
        const double v = background ? s.values[k] - background->values[k] : s.values[k];
        t.rows.push_back({s.freqs[k], v > 0.0 ? 10.0 * std::log10(v / norm) : kNaN});
    }
    return t;
}

RunResult run_spectrum(const ExperimentConfig& c, const RunOptions& opt) {
    RunResult result;
    const FrequencyGrid& g = c.grid;
    const bool raw = c.measurement == Measurement::raw;
    const bool cross = c.measurement == Measurement::demod;
    const FilterChain raw_chain(c.dsp.raw_chain, g.sample_rate);
    const auto raw_response = raw_chain.bin_response(g.n_samples);

    DemodSpec ds;
    ds.lo_freq = c.beams.beat_freq;
    ds.lo_phase = lo_phase(c);
    ds.chain = c.dsp.demod_chain;
    ds.decimation = c.dsp.decimation;
    if (c.dsp.post_splitter_noise_rel_db)
        ds.lo_phase_noise_rms = lo_phase_noise_rms(c.beams.e1, c.beams.e2, c.detector.quantum_efficiency,
                                                   from_db(*c.dsp.post_splitter_noise_rel_db));
    const Demodulator demod(ds, g);
    const FrequencyGrid& out_grid = raw ? g : demod.output_grid();
    const SpectrumKind kind = cross ? SpectrumKind::cross : SpectrumKind::auto_psd;

    std::array<SpectrumEstimate, 3> spectra;
    for (RunRole role : {RunRole::background, RunRole::reference, RunRole::target}) {
        const auto run = static_cast<std::uint32_t>(role);
        const InterferometerSetup setup = build_setup(c, role);
        SpectrumAccumulator acc(out_grid.n_samples, out_grid.sample_rate, kind);
        auto frame_spectrum = [&](std::size_t frame) {
            const RngKey key = substream(c.seed, run, frame, 0);
            const PhotocurrentTrace trace =
                role == RunRole::background ? dark_frame(setup, key, frame) : detect_frame(setup, key, frame);
            if (raw) return acc.periodogram(FilterChain::apply_response(raw_response, trace.samples));
            const auto y1 = demod(trace, substream(c.seed, run, frame, 1));
            if (!cross) return acc.periodogram(y1.samples);
            const auto y2 = demod(trace, substream(c.seed, run, frame, 2));
            return acc.cross_periodogram(y1.samples, y2.samples);
        };
        auto est = accumulate(c.frames, opt.workers, acc, frame_spectrum);
        spectra[run] = compensate(est, raw ? raw_chain : demod.chain());
    }
    const auto& [background, reference, target] = spectra;

    auto& s = result.summary;
    for (const auto& nb : c.bands) {
        BandResult br;
        br.name = nb.name;
        br.band = nb.band;
        br.measured = postprocess(target, reference, background, nb.band);
        br.budget = band_budget(c, target, nb.band);
        br.prediction_db = (raw && c.scheme == Scheme::straightforward) ? kNaN : br.budget.reduction_db();
        s.bands.push_back(br);
    }

    const auto ref_sub = subtract_background(reference, background);
    const double norm = band_mean(ref_sub, c.normalization_band);
    if (!(norm > 0.0)) throw DegenerateSubtraction("normalization band mean is not positive");
    const auto& nb = c.normalization_band;
    std::vector<std::string> comments{
        "config_hash=" + config_hash(c),
        "frames=" + std::to_string(c.frames),
        "measurement=" + to_string(c.measurement),
        std::string("estimator=") + (cross ? "cross" : "auto"),
        "normalization_band_hz=" + fmt_double(nb.center, "%.1f") + "+-" + fmt_double(nb.half_width, "%.1f") +
            " excluding +-" + fmt_double(nb.exclusion_half_width, "%.1f"),
        "background_subtracted=true, compensated=true",
    };
    result.tables.push_back(spectrum_table("target.csv", target, &background, norm, comments));
    result.tables.push_back(spectrum_table("reference.csv", reference, &background, norm, comments));
    comments[5] = "background_subtracted=false, compensated=true";
    result.tables.push_back(spectrum_table("background.csv", background, nullptr, norm, comments));
    s.metrics.emplace_back("normalization_psd", norm);
    result.spectra = {{"background", background}, {"reference", reference}, {"target", target}};
    return result;
}

RunResult run_epr(const ExperimentConfig& c, const RunOptions& opt) {
    RunResult result;
    const FrequencyGrid& g = c.grid;
    const auto n = static_cast<std::int64_t>(g.n_samples);
    const double df = g.bin_spacing();

    // Random draws: frequencies on-grid, states vacuum or arbitrary squeezed.
    std::vector<double> residuals(c.frames);
    parallel_for(c.frames, opt.workers, [&](std::size_t d) {
        NormalStream u(substream(c.seed, 0, d, 0).derive(1));
        auto pick = [&](std::int64_t lo, std::int64_t hi) {
            return lo + static_cast<std::int64_t>(u.next_uniform() * static_cast<double>(hi - lo + 1));
        };
        const std::int64_t beat_bins = pick(1, n / 8);
        const std::int64_t lo = -n / 2 + 1 + beat_bins, hi = n / 2 - 1 - 2 * beat_bins;
        const std::int64_t w0_bin = pick(lo, hi);
        const double beat = static_cast<double>(beat_bins) * df;
        const double omega0 = static_cast<double>(w0_bin) * df - g.center_offset;
        FieldRealization field = make_vacuum_field(g, substream(c.seed, 0, d, 1));
        if (u.next_uniform() > 0.3) {
            SqueezerSpec s;
            s.pump_ratio = 0.95 * u.next_uniform();
            s.hwhm = 1e6 + 49e6 * u.next_uniform();
            s.escape_efficiency = 0.5 + 0.5 * u.next_uniform();
            s.squeeze_angle = 2.0 * std::numbers::pi * u.next_uniform();
            s.center_freq = static_cast<double>(pick(-n / 2 + 1, n / 2 - 1)) * df - g.center_offset;
            field = apply_squeezer(field, s);
        }
        residuals[d] = epr_identity_residual(field, omega0, beat);
    });
    double worst = 0.0;
    for (double r : residuals) worst = std::max(worst, r);

    auto& s = result.summary;
    s.metrics.emplace_back("draws", static_cast<double>(c.frames));
    s.metrics.emplace_back("max_residual", worst);

    OutputTable t{"epr_variances.csv",
                  {"config_hash=" + config_hash(c), "frames_per_point=" + std::to_string(c.epr.variance_frames),
                   "vacuum grouped-term variance = 2"},
                  {"pump_ratio", "phase_group_var", "amplitude_group_var"},
                  {}};
    for (std::size_t i = 0; i < c.epr.pump_ratios.size(); ++i) {
        SqueezerSpec sq;
        sq.pump_ratio = c.epr.pump_ratios[i];
        sq.hwhm = c.epr.hwhm;
        sq.center_freq = c.beams.beat_freq;
        std::vector<std::array<double, 2>> per(c.epr.variance_frames);
        parallel_for(per.size(), opt.workers, [&](std::size_t f) {
            const auto field = apply_squeezer(make_vacuum_field(g, substream(c.seed, 1 + i, f, 0)), sq);
            const auto e = epr_decomposition(field, 0.0, c.beams.beat_freq);
            double vp = 0.0, va = 0.0;
            for (std::size_t k = 0; k < e.lhs.size(); ++k) {
                vp += e.phase_group[k] * e.phase_group[k];
                va += e.amplitude_group[k] * e.amplitude_group[k];
            }
            per[f] = {vp / static_cast<double>(e.lhs.size()), va / static_cast<double>(e.lhs.size())};
        });
        double vp = 0.0, va = 0.0;
        for (const auto& p : per) {
            vp += p[0];
            va += p[1];
        }
        vp /= static_cast<double>(per.size());
        va /= static_cast<double>(per.size());
        t.rows.push_back({sq.pump_ratio, vp, va});
        const std::string key = "x_" + fmt_double(sq.pump_ratio, "%.3f");
        s.metrics.emplace_back(key + ".phase_group_var", vp);
        s.metrics.emplace_back(key + ".amplitude_group_var", va);
    }
    result.tables.push_back(std::move(t));
    return result;
}

RunResult run_sweep(const ExperimentConfig& c, const RunOptions& opt) {
    RunResult result;
    const FrequencyGrid& g = c.grid;
    auto& s = result.summary;
    double previous = -1.0;
    bool monotone = true;
    for (std::size_t i = 0; i < c.sweep.pump_mw.size(); ++i) {
        const double pump = c.sweep.pump_mw[i];
        SqueezerSpec sq;
        sq.pump_ratio = std::sqrt(pump / c.sweep.threshold_mw);
        sq.hwhm = c.sweep.hwhm;
        sq.escape_efficiency = c.sweep.escape_efficiency;
        const auto run = static_cast<std::uint32_t>(i);
        SpectrumAccumulator acc(g.n_samples, g.sample_rate, SpectrumKind::auto_psd);
        std::array<SpectrumEstimate, 2> quad;
        for (std::size_t q = 0; q < 2; ++q) {
            quad[q] = accumulate(c.frames, opt.workers, acc, [&](std::size_t frame) {
                const auto field = apply_squeezer(make_vacuum_field(g, substream(c.seed, run, frame, 0)), sq);
                const auto pair = quadrature_series(field, 0.0);
                return acc.periodogram(q == 0 ? pair.a1 : pair.a2);
            });
        }
        OutputTable t{"pump_" + fmt_mw(pump) + "mw.csv",
                      {"config_hash=" + config_hash(c), "frames=" + std::to_string(c.frames),
                       "pump_mw=" + fmt_double(pump, "%.1f"), "pump_ratio=" + fmt_double(sq.pump_ratio)},
                      {"freq_hz", "squeezing_db_sim", "squeezing_db_model", "antisqueezing_db_sim",
                       "antisqueezing_db_model"},
                      {}};
        for (std::size_t k = 1; k < quad[0].freqs.size(); ++k) {
            const auto model = opo_squeezing_spectrum(sq, quad[0].freqs[k]);
            t.rows.push_back({quad[0].freqs[k], to_db(quad[0].values[k]), to_db(model.squeezed),
                              to_db(quad[1].values[k]), to_db(model.antisqueezed)});
        }
        result.tables.push_back(std::move(t));

        const auto bins = band_bins(quad[0], c.sweep.summary_band);
        double sim_s = 0.0, sim_a = 0.0, mod_s = 0.0, mod_a = 0.0;
        for (auto k : bins) {
            const auto model = opo_squeezing_spectrum(sq, quad[0].freqs[k]);
            sim_s += quad[0].values[k];
            sim_a += quad[1].values[k];
            mod_s += model.squeezed;
            mod_a += model.antisqueezed;
        }
        const double nb = static_cast<double>(bins.size());
        const std::string key = "pump_" + fmt_mw(pump) + "mw";
        const double sq_db = -to_db(sim_s / nb);
        s.metrics.emplace_back(key + ".squeezing_db_sim", sq_db);
        s.metrics.emplace_back(key + ".squeezing_db_model", -to_db(mod_s / nb));
        s.metrics.emplace_back(key + ".antisqueezing_db_sim", to_db(sim_a / nb));
        s.metrics.emplace_back(key + ".antisqueezing_db_model", to_db(mod_a / nb));
        if (sq_db <= previous) monotone = false;
        previous = sq_db;
    }
    s.metrics.emplace_back("squeezing_increases_with_pump", monotone ? 1.0 : 0.0);
    return result;
}

}  // namespace

std::string to_string(RunRole r) {
    switch (r) {
        case RunRole::background: return "background";
        case RunRole::reference: return "reference";
        case RunRole::target: return "target";
    }
    return "target";
}

InterferometerSetup build_setup(const ExperimentConfig& c, RunRole role) {
    InterferometerSetup s;
    s.grid = c.grid;
    s.beams[0].amplitude = c.beams.e1;
    s.beams[0].carrier_freq = 0.0;
    s.beams[0].static_phase = c.beams.phase1;
    s.beams[0].phase_signal.mod_freq = c.beams.mod_freq;
    s.beams[0].phase_signal.mod_depth = c.beams.mod_depth;
    s.beams[1].amplitude = c.beams.e2;
    s.beams[1].carrier_freq = c.beams.beat_freq;
    s.beams[1].static_phase = c.beams.phase2;
    s.beams[1].phase_signal.classical_fraction = c.beams.classical_fraction;

    const bool squeezed = role == RunRole::target && c.scheme != Scheme::unsqueezed;
    std::array<std::optional<SqueezerSpec>, 2> sq{};
    if (squeezed) sq = {squeezer_spec(c.pickoffs[0]), squeezer_spec(c.pickoffs[1])};
    s.pickoffs = c.scheme == Scheme::straightforward ? straightforward_pickoffs(s.beams, sq, 1.0)
                                                     : proposed_pickoffs(s.beams, sq, 1.0);
    for (std::size_t i = 0; i < 2; ++i) {
        s.pickoffs[i].reflectivity = c.pickoffs[i].reflectivity;
        if (squeezed) {
            s.pickoffs[i].injection_phase += c.pickoffs[i].angle_error;
            s.pickoffs[i].jitter_rms = c.pickoffs[i].jitter_rms;
        }
    }
    s.scheme = role == RunRole::target ? c.scheme : Scheme::unsqueezed;

    s.detector.quantum_efficiency = c.detector.quantum_efficiency;
    s.detector.electronic_noise_rel_db = c.detector.electronic_noise_rel_db;
    s.detector.reference_floor = unsqueezed_shot_floor(c.beams.e1, c.beams.e2, c.detector.quantum_efficiency);
    s.detector.clip_level = c.detector.clip_level;
    s.detector.gain_ripple_db = c.detector.gain_ripple_db;
    if (role == RunRole::background) {
        s.beams[0].amplitude = 0.0;
        s.beams[1].amplitude = 0.0;
    }
    return s;
}

NoiseBudget band_budget(const ExperimentConfig& c, const SpectrumEstimate& axis, const BandSpec& band) {
    std::vector<Weighted> points;
    auto gain2 = [&](double f) { return from_db(gain_ripple_db_at(c.detector.gain_ripple_db, f)); };
    for (auto k : band_bins(axis, band)) {
        const double f = axis.freqs[k];
        if (c.measurement == Measurement::raw) {
            points.push_back({f, gain2(f)});
        } else {
            const double lo = std::abs(c.beams.beat_freq - f), hi = c.beams.beat_freq + f;
            points.push_back({lo, gain2(lo)});
            points.push_back({hi, gain2(hi)});
        }
    }
    return weighted_budget(c, points);
}

RunResult run_experiment(const ExperimentConfig& c, const RunOptions& options) {
    c.validate();
    const auto start = std::chrono::steady_clock::now();
    RunResult r;
    switch (c.kind) {
        case ExperimentKind::spectrum: r = run_spectrum(c, options); break;
        case ExperimentKind::epr_identity: r = run_epr(c, options); break;
        case ExperimentKind::pump_sweep: r = run_sweep(c, options); break;
    }
    r.summary.name = c.name;
    r.summary.kind = c.kind;
    r.summary.frames = c.frames;
    r.summary.seed = c.seed;
    r.summary.config_hash = config_hash(c);
    r.summary.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string format_summary(const RunSummary& s) {
    std::ostringstream out;
    out << "name=" << s.name << '\n';
    out << "kind=" << to_string(s.kind) << '\n';
    out << "seed=" << s.seed << '\n';
    out << "frames=" << s.frames << '\n';
    out << "config_hash=" << s.config_hash << '\n';
    for (const auto& b : s.bands) {
        const std::string p = "band." + b.name + ".";
        out << p << "center_hz=" << fmt_double(b.band.center, "%.1f") << '\n';
        out << p << "half_width_hz=" << fmt_double(b.band.half_width, "%.1f") << '\n';
        out << p << "exclusion_half_width_hz=" << fmt_double(b.band.exclusion_half_width, "%.1f") << '\n';
        out << p << "bins=" << b.measured.n_bins << '\n';
        out << p << "reduction_db=" << fmt_double(b.measured.reduction_db) << '\n';
        out << p << "std_error_db=" << fmt_double(b.measured.std_error_db) << '\n';
        out << p << "prediction_db=" << fmt_double(b.prediction_db) << '\n';
        out << p << "budget.floor=" << fmt_double(b.budget.floor) << '\n';
        out << p << "budget.squeezed=" << fmt_double(b.budget.squeezed) << '\n';
        out << p << "budget.antisqueezed=" << fmt_double(b.budget.antisqueezed) << '\n';
        out << p << "budget.loss_vacuum=" << fmt_double(b.budget.loss_vacuum) << '\n';
        out << p << "budget.classical=" << fmt_double(b.budget.classical) << '\n';
        out << p << "budget.independent=" << fmt_double(b.budget.electronic) << '\n';
    }
    for (const auto& [key, value] : s.metrics) out << key << '=' << fmt_double(value, "%.9g") << '\n';
    return out.str();
}

std::string format_table(const OutputTable& t) {
    std::ostringstream out;
    for (const auto& c : t.comments) out << "# " << c << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt_double(row[i], i ? "%.6f" : "%.1f");
        out << '\n';
    }
    return out.str();
}

void write_outputs(const RunResult& result, const ExperimentConfig& c, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
        f << text;
    };
    write("config.json", to_json(c).dump(2) + "\n");
    for (const auto& t : result.tables) write(t.file, format_table(t));
    write("summary.txt", format_summary(result.summary));
}

}  // namespace sqhet
