#include "hycass/evaluation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <future>
#include <limits>
#include <set>
#include <sstream>

#include "hycass/rng.hpp"

namespace hycass {

namespace {

constexpr double kRadToDeg = 57.295779513082320877;

double mse_of(const double* a, const double* b, int64_t n) {
    double acc = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / double(n);
}

PsnrResult psnr_from_mse(double mse, double max_val) {
    PsnrResult r;
    if (mse <= 0.0) {
        r.infinite = true;
        r.db = std::numeric_limits<double>::infinity();
        return r;
    }
    r.db = 10.0 * std::log10(max_val * max_val / mse);
    return r;
}

}  // namespace

PsnrResult psnr(const HsiCube& x, const HsiCube& xhat, double max_val) {
    require(x.height == xhat.height && x.width == xhat.width && x.bands == xhat.bands,
            Err::shape_mismatch, "psnr operand dims differ");
    return psnr_from_mse(mse_of(x.values.data(), xhat.values.data(), x.sample_count()),
                         max_val);
}

PsnrResult psnr(const Tensor<double>& x, const Tensor<double>& xhat, double max_val) {
    require(x.same_shape(xhat), Err::shape_mismatch, "psnr operand dims differ");
    return psnr_from_mse(mse_of(x.data.data(), xhat.data.data(), x.numel()), max_val);
}

SaMapResult sa_error_map(const HsiCube& x, const HsiCube& xhat) {
    require(x.height == xhat.height && x.width == xhat.width && x.bands == xhat.bands,
            Err::shape_mismatch, "spectral angle operand dims differ");
    const int H = x.height, W = x.width, C = x.bands;
    SaMapResult out;
    out.degrees = Tensor<double>({H, W});
    out.min_deg = std::numeric_limits<double>::infinity();
    out.max_deg = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    int64_t counted = 0;
    for (int h = 0; h < H; ++h)
        for (int w = 0; w < W; ++w) {
            const double* a = &x.values[(size_t(h) * W + w) * C];
            const double* b = &xhat.values[(size_t(h) * W + w) * C];
            double dot = 0.0, na = 0.0, nb = 0.0;
            for (int c = 0; c < C; ++c) {
                dot += a[c] * b[c];
                na += a[c] * a[c];
                nb += b[c] * b[c];
            }
            if (na == 0.0 || nb == 0.0) {
                out.degrees.at(h, w) = std::numeric_limits<double>::quiet_NaN();
                ++out.excluded;
                continue;
            }
            double cosv = dot / (std::sqrt(na) * std::sqrt(nb));
            cosv = std::clamp(cosv, -1.0, 1.0);
            double deg = std::acos(cosv) * kRadToDeg;
            out.degrees.at(h, w) = deg;
            out.min_deg = std::min(out.min_deg, deg);
            out.max_deg = std::max(out.max_deg, deg);
            sum += deg;
            ++counted;
        }
    require(counted > 0, Err::empty_input, "every pixel had a zero spectrum");
    out.mean_deg = sum / double(counted);
    return out;
}

SaResult spectral_angle(const HsiCube& x, const HsiCube& xhat) {
    SaMapResult map = sa_error_map(x, xhat);
    return {map.mean_deg, map.excluded};
}

void write_sa_map_pgm(const SaMapResult& map, const std::string& path) {
    const int H = map.degrees.dim(0), W = map.degrees.dim(1);
    std::string header = "P5\n" + std::to_string(W) + " " + std::to_string(H) + "\n65535\n";
    std::vector<uint8_t> bytes(header.begin(), header.end());
    bytes.reserve(bytes.size() + size_t(H) * W * 2);
    for (int h = 0; h < H; ++h)
        for (int w = 0; w < W; ++w) {
            double deg = map.degrees.at(h, w);
            double scaled = std::isnan(deg) ? 0.0 : std::clamp(deg / 10.0, 0.0, 1.0) * 65535.0;
            uint16_t v = uint16_t(std::lround(scaled));
            bytes.push_back(uint8_t(v >> 8));  // PGM 16-bit samples are big-endian
            bytes.push_back(uint8_t(v & 0xff));
        }
    write_file(path, bytes);

    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "min_deg %.4f\nmax_deg %.4f\nmean_deg %.4f\nexcluded %lld\nscale 0-10 deg\n",
                  map.min_deg, map.max_deg, map.mean_deg, (long long)map.excluded);
    std::string side(buf);
    write_file(path + ".txt", std::vector<uint8_t>(side.begin(), side.end()));
}

// ---------------------------------------------------------------------------
// PCA
// ---------------------------------------------------------------------------

PcaModel pca_fit(const Tensor<double>& pixels, int gamma) {
    require(pixels.rank() == 2, Err::shape_mismatch, "pixel matrix must be {n, C}");
    const int64_t n = pixels.dim(0);
    const int C = pixels.dim(1);
    require(gamma >= 1 && gamma <= C, Err::invalid_argument, "gamma must be in [1, C]");
    require(n >= 2, Err::insufficient_rank, "need at least two pixels");

    PcaModel model;
    model.gamma = gamma;
    model.mean.assign(size_t(C), 0.0);
    for (int64_t i = 0; i < n; ++i)
        for (int c = 0; c < C; ++c) model.mean[size_t(c)] += pixels.at(int(i), c);
    for (double& m : model.mean) m /= double(n);

    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(C, C);
    for (int64_t i = 0; i < n; ++i) {
        Eigen::VectorXd d(C);
        for (int c = 0; c < C; ++c) d(c) = pixels.at(int(i), c) - model.mean[size_t(c)];
        cov.noalias() += d * d.transpose();
    }
    cov /= double(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    require(solver.info() == Eigen::Success, Err::insufficient_rank,
            "eigendecomposition failed");
    // ascending eigenvalues; take the top gamma
    const Eigen::VectorXd& evals = solver.eigenvalues();
    double lambda_max = std::max(evals(C - 1), 0.0);
    int usable = 0;
    for (int i = 0; i < C; ++i)
        if (evals(i) > lambda_max * 1e-12 && evals(i) > 0.0) ++usable;
    require(usable >= gamma, Err::insufficient_rank,
            "pixel matrix rank " + std::to_string(usable) + " below requested gamma " +
                std::to_string(gamma));

    model.axes = Tensor<double>({C, gamma});
    for (int j = 0; j < gamma; ++j) {
        Eigen::VectorXd axis = solver.eigenvectors().col(C - 1 - j);
        int arg = 0;
        for (int c = 1; c < C; ++c)
            if (std::abs(axis(c)) > std::abs(axis(arg))) arg = c;
        if (axis(arg) < 0.0) axis = -axis;
        for (int c = 0; c < C; ++c) model.axes.at(c, j) = axis(c);
    }
    return model;
}

PcaModel pca_truncate(const PcaModel& model, int gamma) {
    require(gamma >= 1 && gamma <= model.gamma, Err::invalid_argument,
            "truncation gamma out of range");
    PcaModel out;
    out.gamma = gamma;
    out.mean = model.mean;
    const int C = int(model.mean.size());
    out.axes = Tensor<double>({C, gamma});
    for (int c = 0; c < C; ++c)
        for (int j = 0; j < gamma; ++j) out.axes.at(c, j) = model.axes.at(c, j);
    return out;
}

PcaCodecResult pca_codec(const HsiCube& cube, const PcaModel& model) {
    const int C = cube.bands;
    require(C == int(model.mean.size()), Err::band_mismatch,
            "cube bands do not match the PCA model");
    PcaCodecResult out;
    out.cr_spec = double(C) / double(model.gamma);
    out.reconstruction = cube;
    std::vector<double> coeff(static_cast<size_t>(model.gamma));
    for (int h = 0; h < cube.height; ++h)
        for (int w = 0; w < cube.width; ++w) {
            const double* px = &cube.values[(size_t(h) * cube.width + w) * C];
            double* py = &out.reconstruction.values[(size_t(h) * cube.width + w) * C];
            for (int j = 0; j < model.gamma; ++j) {
                double acc = 0.0;
                for (int c = 0; c < C; ++c)
                    acc += model.axes.at(c, j) * (px[c] - model.mean[size_t(c)]);
                coeff[size_t(j)] = acc;
            }
            for (int c = 0; c < C; ++c) {
                double acc = model.mean[size_t(c)];
                for (int j = 0; j < model.gamma; ++j)
                    acc += model.axes.at(c, j) * coeff[size_t(j)];
                py[c] = acc;
            }
        }
    return out;
}

Tensor<double> collect_pixels(const std::vector<HsiCube>& cubes, int64_t max_pixels,
                              uint64_t seed) {
    require(!cubes.empty(), Err::empty_input, "no cubes to sample pixels from");
    const int C = cubes.front().bands;
    int64_t total = 0;
    for (const HsiCube& c : cubes) {
        require(c.bands == C, Err::band_mismatch, "cubes have mixed band counts");
        total += int64_t(c.height) * c.width;
    }
    int64_t keep = std::min(total, max_pixels);
    Tensor<double> out({int(keep), C});

    if (keep == total) {
        int64_t row = 0;
        for (const HsiCube& c : cubes)
            for (int h = 0; h < c.height; ++h)
                for (int w = 0; w < c.width; ++w, ++row)
                    std::memcpy(&out.data[size_t(row) * C],
                                &c.values[(size_t(h) * c.width + w) * C],
                                sizeof(double) * size_t(C));
        return out;
    }

    // uniform sample of global pixel indices without replacement
    Rng rng(derive_seed(seed, 0x70636131ull));
    std::set<int64_t> chosen;
    while (int64_t(chosen.size()) < keep) {
        uint64_t limit = UINT64_MAX - UINT64_MAX % uint64_t(total);
        uint64_t v;
        do {
            v = rng.next_u64();
        } while (v >= limit);
        chosen.insert(int64_t(v % uint64_t(total)));
    }
    int64_t row = 0;
    auto it = chosen.begin();
    int64_t base = 0;
    for (const HsiCube& c : cubes) {
        int64_t count = int64_t(c.height) * c.width;
        while (it != chosen.end() && *it < base + count) {
            int64_t local = *it - base;
            std::memcpy(&out.data[size_t(row) * C], &c.values[size_t(local) * C],
                        sizeof(double) * size_t(C));
            ++row;
            ++it;
        }
        base += count;
    }
    return out;
}

// ---------------------------------------------------------------------------
// rate-distortion sweep
// ---------------------------------------------------------------------------

std::vector<RdGridPoint> parse_grid_file(const std::string& path) {
    std::vector<uint8_t> bytes = read_file(path);
    std::string text(bytes.begin(), bytes.end());
    std::istringstream in(text);
    std::vector<RdGridPoint> grid;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t'))
            line.pop_back();
        size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        line.erase(0, start);

        size_t comma = line.find(',');
        require(comma != std::string::npos, Err::invalid_argument,
                "grid line " + std::to_string(lineno) + ": expected 'S,gamma' or 'S,target_cr=X'");
        RdGridPoint p;
        try {
            p.stages = std::stoi(line.substr(0, comma));
            std::string rhs = line.substr(comma + 1);
            if (rhs.rfind("target_cr=", 0) == 0) {
                p.explicit_gamma = false;
                p.target_cr = std::stod(rhs.substr(10));
            } else {
                p.explicit_gamma = true;
                p.gamma = std::stoi(rhs);
            }
        } catch (const std::exception&) {
            raise(Err::invalid_argument, "grid line " + std::to_string(lineno) + ": parse error");
        }
        require(p.stages >= 0, Err::invalid_argument,
                "grid line " + std::to_string(lineno) + ": negative S");
        grid.push_back(p);
    }
    return grid;
}

std::string rd_csv_header() {
    return "dataset,S,gamma,cr,cr_spec,cr_spat,psnr_db,sa_deg,seconds";
}

std::string rd_csv_row(const RdRecord& r) {
    char buf[256];
    if (r.failed) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%d,%.4f,%.4f,%.4f,nan,nan,%.3f",
                      r.dataset_id.c_str(), r.stages, r.gamma, r.cr, r.cr_spec, r.cr_spat,
                      r.seconds);
        return buf;
    }
    char psnr_buf[32];
    if (std::isinf(r.psnr_db))
        std::snprintf(psnr_buf, sizeof(psnr_buf), "inf");
    else
        std::snprintf(psnr_buf, sizeof(psnr_buf), "%.3f", r.psnr_db);
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%.4f,%.4f,%.4f,%s,%.4f,%.3f",
                  r.dataset_id.c_str(), r.stages, r.gamma, r.cr, r.cr_spec, r.cr_spat,
                  psnr_buf, r.sa_deg, r.seconds);
    return buf;
}

namespace {

struct ExistingRows {
    std::set<std::pair<int, int>> points;  // (S, gamma)
    bool has_header = false;
};

ExistingRows scan_existing_csv(const std::string& path) {
    ExistingRows out;
    std::ifstream in(path);
    if (!in.good()) return out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("dataset,", 0) == 0) {
            out.has_header = true;
            continue;
        }
        // dataset,S,gamma,...
        size_t c1 = line.find(',');
        if (c1 == std::string::npos) continue;
        size_t c2 = line.find(',', c1 + 1);
        if (c2 == std::string::npos) continue;
        size_t c3 = line.find(',', c2 + 1);
        if (c3 == std::string::npos) continue;
        try {
            int s = std::stoi(line.substr(c1 + 1, c2 - c1 - 1));
            int g = std::stoi(line.substr(c2 + 1, c3 - c2 - 1));
            out.points.insert({s, g});
        } catch (const std::exception&) {
            continue;
        }
    }
    return out;
}

RdRecord evaluate_point(const SplitCubes& data, const RdGridPoint& point,
                        const RdSweepOptions& opt, size_t index,
                        TrainHistory* history_out, std::FILE* log) {
    auto t0 = std::chrono::steady_clock::now();
    RdRecord rec;
    rec.dataset_id = opt.dataset_id;
    rec.stages = point.stages;

    HycassConfig cfg = opt.base_model;
    cfg.stages = point.stages;
    cfg.latent_channels = point.explicit_gamma
                              ? point.gamma
                              : gamma_for_target_cr(cfg.bands, point.stages, point.target_cr);
    rec.gamma = cfg.latent_channels;
    CrBreakdown cr = achieved_cr(cfg);
    rec.cr = cr.cr;
    rec.cr_spec = cr.cr_spec;
    rec.cr_spat = cr.cr_spat;

    try {
        TrainConfig tc = opt.train;
        tc.seed = derive_seed(opt.train.seed, uint64_t(index));
        TrainResult trained = train(cfg, tc, data.train, data.val, log);
        if (history_out) *history_out = trained.history;

        const std::vector<HsiCube>& eval_set =
            !data.test.empty() ? data.test : (!data.val.empty() ? data.val : data.train);
        double psnr_sum = 0.0, sa_sum = 0.0;
        bool any_inf = false;
        for (const HsiCube& cube : eval_set) {
            auto [unit, norm] = cube.norm_state == NormState::raw
                                    ? min_max_normalize(cube)
                                    : std::make_pair(cube, cube.norm.value_or(
                                                               NormalizationParams{0.0, 1.0}));
            Tensor<float> x = cube_to_tensor<float>(unit);
            Tensor<float> latent = encode_forward(x, trained.best_params);
            Tensor<float> recon_t = decode_forward(latent, trained.best_params);
            HsiCube recon = tensor_to_unit_cube(recon_t);
            PsnrResult p = psnr(unit, recon);
            if (p.infinite)
                any_inf = true;
            else
                psnr_sum += p.db;
            if (opt.sa_on_raw) {
                HsiCube recon_raw = denormalize(recon, norm);
                sa_sum += spectral_angle(cube, recon_raw).mean_deg;
            } else {
                sa_sum += spectral_angle(unit, recon).mean_deg;
            }
        }
        rec.psnr_db = any_inf ? std::numeric_limits<double>::infinity()
                              : psnr_sum / double(eval_set.size());
        rec.sa_deg = sa_sum / double(eval_set.size());
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
        if (log) std::fprintf(log, "sweep point S=%d gamma=%d failed: %s\n", rec.stages,
                              rec.gamma, e.what());
    }
    auto t1 = std::chrono::steady_clock::now();
    rec.seconds = std::chrono::duration<double>(t1 - t0).count();
    return rec;
}

}  // namespace

std::vector<RdRecord> rd_sweep(const SplitCubes& data, const std::vector<RdGridPoint>& grid,
                               const RdSweepOptions& opt,
                               std::vector<TrainHistory>* histories, std::FILE* log) {
    require(!grid.empty(), Err::empty_input, "empty sweep grid");
    require(!data.train.empty(), Err::empty_input, "sweep needs training cubes");

    ExistingRows existing;
    if (!opt.csv_path.empty()) existing = scan_existing_csv(opt.csv_path);

    // resolve gammas first so resume matching works on final (S, gamma) pairs
    std::vector<int> resolved_gamma(grid.size());
    for (size_t i = 0; i < grid.size(); ++i)
        resolved_gamma[i] = grid[i].explicit_gamma
                                ? grid[i].gamma
                                : gamma_for_target_cr(opt.base_model.bands, grid[i].stages,
                                                      grid[i].target_cr);

    std::vector<RdRecord> records(grid.size());
    std::vector<TrainHistory> hist(grid.size());
    std::vector<char> skip(grid.size(), 0);
    for (size_t i = 0; i < grid.size(); ++i)
        if (existing.points.count({grid[i].stages, resolved_gamma[i]})) {
            skip[i] = 1;
            if (log)
                std::fprintf(log, "sweep point S=%d gamma=%d already in CSV, skipping\n",
                             grid[i].stages, resolved_gamma[i]);
        }

    const int jobs = std::max(1, opt.jobs);
    if (jobs == 1) {
        for (size_t i = 0; i < grid.size(); ++i)
            if (!skip[i]) records[i] = evaluate_point(data, grid[i], opt, i, &hist[i], log);
    } else {
        std::vector<std::future<void>> inflight;
        size_t next = 0;
        auto launch = [&](size_t i) {
            inflight.push_back(std::async(std::launch::async, [&, i] {
                records[i] = evaluate_point(data, grid[i], opt, i, &hist[i], nullptr);
            }));
        };
        while (next < grid.size() || !inflight.empty()) {
            while (next < grid.size() && int(inflight.size()) < jobs) {
                if (!skip[next]) launch(next);
                ++next;
            }
            if (!inflight.empty()) {
                inflight.front().wait();
                inflight.erase(inflight.begin());
            }
        }
    }

    std::vector<RdRecord> out;
    std::vector<TrainHistory> out_hist;
    for (size_t i = 0; i < grid.size(); ++i)
        if (!skip[i]) {
            out.push_back(records[i]);
            out_hist.push_back(std::move(hist[i]));
        }

    if (!opt.csv_path.empty()) {
        std::ofstream csv(opt.csv_path, std::ios::app);
        require(csv.good(), Err::io_failure, "cannot open " + opt.csv_path);
        if (!existing.has_header) csv << rd_csv_header() << "\n";
        for (const RdRecord& r : out) csv << rd_csv_row(r) << "\n";
    }
    if (histories) *histories = std::move(out_hist);
    return out;
}

}  // namespace hycass
