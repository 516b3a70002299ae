#include "ddbs/training.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace ddbs {

Rng make_rng(std::uint64_t master, std::uint64_t trial, std::uint64_t tag) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(master), hi(master), lo(trial), hi(trial), lo(tag), hi(tag)};
    return Rng(seq);
}

PilotBeams::PilotBeams(const PilotPlan& plan, const SystemConfig& cfg)
    : n_pilots_(plan.K), n_sub_(cfg.n_subcarriers) {
    beams_.reserve(static_cast<std::size_t>(n_pilots_) * static_cast<std::size_t>(n_sub_));
    for (int k = 0; k < n_pilots_; ++k) {
        const TdPsParams prm = plan.pilot(k);
        for (int m = 1; m <= n_sub_; ++m) beams_.push_back(combined_beamformer(prm, cfg, subcarrier_freq(cfg, m)));
    }
}

double noise_variance(const SystemConfig& cfg, const Channel& ch, double snr) {
    if (!(snr > 0.0)) throw std::invalid_argument("snr must be positive");
    if (std::isinf(snr)) return 0.0;
    return cfg.n_antennas * ch.beta_c * ch.beta_c / snr;
}

cdouble complex_noise(double variance, Rng& rng) {
    if (variance <= 0.0) return {0.0, 0.0};
    std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

Eigen::VectorXd simulate_pilot(const Channel& ch, const PilotBeams& beams, const SystemConfig& cfg, int k, double snr,
                               Rng& rng) {
    const int M = cfg.n_subcarriers;
    if (ch.n_subcarriers() != M || beams.n_subcarriers() != M)
        throw std::invalid_argument("channel, pilots and config disagree on the subcarrier count");
    const double var = noise_variance(cfg, ch, snr);
    Eigen::VectorXd col(M);
    for (int m = 1; m <= M; ++m) {
        const cdouble y = bilinear(ch.per_subcarrier[m - 1], beams.beam(k, m));
        col[m - 1] = std::abs(y + complex_noise(var, rng));
    }
    return col;
}

ObservationGrid simulate_observations(const Channel& ch, const PilotBeams& beams, const SystemConfig& cfg, double snr,
                                      Rng& rng, int n_pilots) {
    const int K = n_pilots < 0 ? beams.n_pilots() : std::min(n_pilots, beams.n_pilots());
    ObservationGrid obs;
    obs.snr = snr;
    obs.magnitudes.resize(cfg.n_subcarriers, K);
    for (int k = 0; k < K; ++k) obs.magnitudes.col(k) = simulate_pilot(ch, beams, cfg, k, snr, rng);
    return obs;
}

namespace {

void finish(TrainingEstimate& est) {
    if (est.theta_hat < -1.0 || est.theta_hat > 1.0) {
        est.theta_hat = std::clamp(est.theta_hat, -1.0, 1.0);
        est.clamped = true;
    }
    if (est.alpha_hat < 0.0) {
        est.alpha_hat = 0.0;
        est.clamped = true;
    }
}

double centered_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ac = a.array() - a.mean();
    const Eigen::VectorXd bc = b.array() - b.mean();
    const double den = ac.norm() * bc.norm();
    return den > 0.0 ? ac.dot(bc) / den : 0.0;
}

}  // namespace

TrainingEstimate ongrid_train(const ObservationGrid& obs, const PilotPlan& plan, const SystemConfig& cfg) {
    if (obs.magnitudes.size() == 0) throw std::invalid_argument("empty observation grid");
    if (obs.n_subcarriers() != cfg.n_subcarriers || obs.n_pilots() > plan.K)
        throw std::invalid_argument("observation grid does not match the plan");
    int best_m = 1;
    int best_k = 0;
    double best = -1.0;
    for (int m = 1; m <= obs.n_subcarriers(); ++m)
        for (int k = 0; k < obs.n_pilots(); ++k)
            if (obs.magnitudes(m - 1, k) > best) {
                best = obs.magnitudes(m - 1, k);
                best_m = m;
                best_k = k;
            }
    const BeamFocus f = nearest_focus(plan.pilot(best_k), cfg, best_m);
    TrainingEstimate est;
    est.theta_hat = f.theta;
    est.alpha_hat = f.alpha;
    est.m_hat = best_m;
    est.k_hat = best_k + 1;
    est.scheme = "ongrid";
    est.pilots_used = obs.n_pilots();
    est.clamped = f.clamped;
    finish(est);
    return est;
}

NewtonResult solve_ellipse_pair(const EllipseCoeffs& ca, const EllipseCoeffs& cb, const PolarLocation& fa,
                                const PolarLocation& fb, double gain_a, double gain_b, const PolarLocation& start) {
    Eigen::Vector2d x(start.theta, start.alpha);
    auto residual = [&](const Eigen::Vector2d& v) {
        const double ta = fa.theta - v[0];
        const double aa = fa.alpha - v[1];
        const double tb = fb.theta - v[0];
        const double ab = fb.alpha - v[1];
        return Eigen::Vector2d(ca.sigma1 * ta * ta + ca.sigma2 * aa * aa - (1.0 - gain_a),
                               cb.sigma1 * tb * tb + cb.sigma2 * ab * ab - (1.0 - gain_b));
    };
    NewtonResult out;
    for (int it = 0; it <= 50; ++it) {
        const Eigen::Vector2d F = residual(x);
        out.iterations = it;
        if (F.norm() < 1e-10) {
            out.theta = x[0];
            out.alpha = x[1];
            out.converged = true;
            return out;
        }
        if (it == 50) break;
        Eigen::Matrix2d J;
        J << -2.0 * ca.sigma1 * (fa.theta - x[0]), -2.0 * ca.sigma2 * (fa.alpha - x[1]),
            -2.0 * cb.sigma1 * (fb.theta - x[0]), -2.0 * cb.sigma2 * (fb.alpha - x[1]);
        const Eigen::Vector2d scale(1.0 / std::max(J.col(0).norm(), 1e-300), 1.0 / std::max(J.col(1).norm(), 1e-300));
        const Eigen::Matrix2d Js = J * scale.asDiagonal();
        const Eigen::JacobiSVD<Eigen::Matrix2d> svd(Js);
        const auto sv = svd.singularValues();
        if (!(sv[1] > 0.0) || sv[0] / sv[1] > 1e12) break;
        Eigen::Vector2d dx = scale.asDiagonal() * Js.fullPivLu().solve(-F);
        const Eigen::Vector2d trial = x + dx;
        if (trial[0] < -1.0 || trial[0] > 1.0 || trial[1] < 0.0) dx *= 0.5;
        x += dx;
    }
    out.theta = x[0];
    out.alpha = x[1];
    return out;
}

TrainingEstimate aux_pair_train(const ObservationGrid& obs, const PilotPlan& plan, const SystemConfig& cfg) {
    TrainingEstimate base = ongrid_train(obs, plan, cfg);
    base.scheme = "aux_pair";
    auto fallback = [&base] {
        base.fallback = true;
        return base;
    };
    const int M = obs.n_subcarriers();
    if (M < 2 || base.clamped) return fallback();
    const int ma = base.m_hat;
    const int k = base.k_hat - 1;
    int mb = 0;
    if (ma == 1) {
        mb = 2;
    } else if (ma == M) {
        mb = M - 1;
    } else {
        mb = obs.magnitudes(ma, k) > obs.magnitudes(ma - 2, k) ? ma + 1 : ma - 1;
    }
    const TdPsParams prm = plan.pilot(k);
    const BeamFocus fa = nearest_focus(prm, cfg, ma);
    const BeamFocus fb = nearest_focus(prm, cfg, mb);
    if (fb.clamped || fb.p != fa.p) return fallback();
    if (!(base.alpha_hat > 0.0)) return fallback();
    const double r_hat = PolarLocation{base.theta_hat, base.alpha_hat}.distance();
    const double root_n = std::sqrt(static_cast<double>(cfg.n_antennas));
    auto gain_of = [&](int m) {
        const double f = subcarrier_freq(cfg, m);
        const double beta = (kSpeedOfLight / f) / (4.0 * kPi * r_hat);
        return std::clamp(obs.magnitudes(m - 1, k) / (root_n * beta), 1e-12, 1.0);
    };
    const double ga = gain_of(ma);
    const double gb = gain_of(mb);
    if (ga >= 1.0) {
        base.fallback = false;
        return base;
    }
    const PolarLocation pa{fa.theta, fa.alpha};
    const PolarLocation pb{fb.theta, fb.alpha};
    const EllipseCoeffs ca = ellipse_coeffs(cfg, fa.freq);
    const EllipseCoeffs cb = ellipse_coeffs(cfg, fb.freq);

    // One Newton run on each side of the line of centres.
    const double s1 = std::sqrt(ca.sigma1);
    const double s2 = std::sqrt(ca.sigma2);
    Eigen::Vector2d u(s1 * (pb.theta - pa.theta), s2 * (pb.alpha - pa.alpha));
    if (u.norm() == 0.0) return fallback();
    u.normalize();
    const Eigen::Vector2d perp(-u[1] / s1, u[0] / s2);
    const double rad = std::sqrt(std::max(1.0 - ga, 1e-6));
    const Eigen::Vector2d mid(0.5 * (pa.theta + pb.theta), 0.5 * (pa.alpha + pb.alpha));
    std::vector<NewtonResult> roots;
    for (const double sgn : {1.0, -1.0}) {
        const Eigen::Vector2d x0 = mid + sgn * 0.5 * rad * perp;
        const NewtonResult r = solve_ellipse_pair(ca, cb, pa, pb, ga, gb, {x0[0], x0[1]});
        if (r.converged) roots.push_back(r);
    }
    if (roots.empty()) return fallback();

    const Eigen::Map<const Eigen::VectorXd> flat(obs.magnitudes.data(), obs.magnitudes.size());
    const NewtonResult* pick = &roots.front();
    if (roots.size() > 1) {
        double best = -2.0;
        for (const auto& r : roots) {
            Eigen::VectorXd pred(obs.magnitudes.size());
            const PolarLocation loc{r.theta, r.alpha};
            for (int kk = 0; kk < obs.n_pilots(); ++kk) {
                const TdPsParams p = plan.pilot(kk);
                for (int m = 1; m <= M; ++m) pred[(m - 1) + kk * M] = tdps_gain(p, cfg, loc, subcarrier_freq(cfg, m));
            }
            const double score = centered_correlation(pred, flat);
            if (score > best) {
                best = score;
                pick = &r;
            }
        }
    }
    TrainingEstimate est = base;
    est.theta_hat = pick->theta;
    est.alpha_hat = pick->alpha;
    est.fallback = false;
    est.clamped = false;
    finish(est);
    return est;
}

MatchFilterBank::MatchFilterBank(const PilotPlan& plan, const SystemConfig& cfg, int L, int S)
    : plan_(plan), grid_(cfg, L, S), n_sub_(cfg.n_subcarriers) {
    const int M = n_sub_;
    const int K = plan.K;
    const auto G = static_cast<Eigen::Index>(grid_.size());
    sig_.resize(G, static_cast<Eigen::Index>(M) * K);
    const double kc = wavenumber(cfg.carrier_freq);
    Eigen::VectorXd thetas(L), alphas(S);
    for (int l = 0; l < L; ++l) thetas[l] = grid_.location(static_cast<std::size_t>(l) * S).theta;
    for (int s = 0; s < S; ++s) alphas[s] = grid_.location(static_cast<std::size_t>(s)).alpha;
    for (int k = 0; k < K; ++k) {
        const TdPsParams prm = plan.pilot(k);
        for (int m = 1; m <= M; ++m) {
            const double km = wavenumber(subcarrier_freq(cfg, m));
            const Eigen::Index col = (m - 1) + static_cast<Eigen::Index>(k) * M;
            const Eigen::VectorXd x = (km * thetas).array() - (km * prm.theta_t + kc * prm.theta_p);
            const Eigen::VectorXd y = (km * alphas).array() - (km * prm.alpha_t + kc * prm.alpha_p);
            const Eigen::MatrixXd mag = (linear_phase_matrix(cfg, x) * quadratic_phase_matrix(cfg, y)).cwiseAbs();
            for (int l = 0; l < L; ++l)
                sig_.col(col).segment(static_cast<Eigen::Index>(l) * S, S) = mag.row(l).transpose();
        }
    }
    for (int p = 1; p <= K; ++p) {
        const Eigen::Index n = static_cast<Eigen::Index>(p) * M;
        Eigen::VectorXd mean = sig_.leftCols(n).rowwise().sum() / static_cast<double>(n);
        Eigen::VectorXd sq = sig_.leftCols(n).rowwise().squaredNorm();
        Eigen::VectorXd cn = (sq.array() - static_cast<double>(n) * mean.array().square()).max(0.0).sqrt();
        means_.push_back(std::move(mean));
        cnorms_.push_back(std::move(cn));
    }
}

std::size_t MatchFilterBank::best_match(const Eigen::VectorXd& flat_obs, int n_pilots) const {
    if (n_pilots < 1 || n_pilots > plan_.K) throw std::invalid_argument("pilot count outside the bank");
    const Eigen::Index n = static_cast<Eigen::Index>(n_pilots) * n_sub_;
    if (flat_obs.size() < n) throw std::invalid_argument("observation shorter than the bank signature");
    const Eigen::VectorXd g = flat_obs.head(n);
    const double gbar = g.mean();
    const Eigen::VectorXd dots = sig_.leftCols(n) * g;
    const auto& mean = means_[static_cast<std::size_t>(n_pilots - 1)];
    const auto& cn = cnorms_[static_cast<std::size_t>(n_pilots - 1)];
    std::size_t best = 0;
    double best_r = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < dots.size(); ++i) {
        if (!(cn[i] > 0.0)) continue;
        const double r = (dots[i] - static_cast<double>(n) * mean[i] * gbar) / cn[i];
        if (r > best_r) {
            best_r = r;
            best = static_cast<std::size_t>(i);
        }
    }
    return best;
}

MatchFilterBank build_match_filter_bank(const PilotPlan& plan, const SystemConfig& cfg, int L, int S) {
    if (L < 1 || S < 1) throw std::invalid_argument("bank dimensions must be >= 1");
    return MatchFilterBank(plan, cfg, L, S);
}

TrainingEstimate match_filter_train(const ObservationGrid& obs, const MatchFilterBank& bank) {
    if (obs.n_subcarriers() != bank.n_subcarriers() || obs.n_pilots() < 1 || obs.n_pilots() > bank.plan().K)
        throw std::invalid_argument("observation grid does not match the bank");
    const Eigen::Map<const Eigen::VectorXd> flat(obs.magnitudes.data(), obs.magnitudes.size());
    const std::size_t g = bank.best_match(flat, obs.n_pilots());
    TrainingEstimate est;
    est.theta_hat = bank.grid().location(g).theta;
    est.alpha_hat = bank.grid().location(g).alpha;
    est.codeword = static_cast<long>(g);
    est.scheme = "match_filter";
    est.pilots_used = obs.n_pilots();
    finish(est);
    return est;
}

TrainingEstimate exhaustive_polar_train(const Channel& ch, const PolarCodebook& codebook, const SystemConfig& cfg,
                                        double snr, Rng& rng, long budget) {
    const auto total = static_cast<long>(codebook.size());
    const long count = budget < 0 ? total : std::min(budget, total);
    if (count < 1) throw std::invalid_argument("exhaustive training needs at least one codeword");
    const double var = noise_variance(cfg, ch, snr);
    const double inv_root_n = 1.0 / std::sqrt(static_cast<double>(cfg.n_antennas));

    std::map<double, Eigen::Index> theta_index, ring_index;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> cell(static_cast<std::size_t>(count));
    for (long g = 0; g < count; ++g) {
        const PolarLocation& loc = codebook.location(static_cast<std::size_t>(g));
        const auto ti = theta_index.try_emplace(loc.theta, static_cast<Eigen::Index>(theta_index.size())).first->second;
        const auto ri = ring_index.try_emplace(loc.alpha, static_cast<Eigen::Index>(ring_index.size())).first->second;
        cell[static_cast<std::size_t>(g)] = {ti, ri};
    }
    Eigen::VectorXd thetas(static_cast<Eigen::Index>(theta_index.size()));
    Eigen::VectorXd rings(static_cast<Eigen::Index>(ring_index.size()));
    for (const auto& [v, i] : theta_index) thetas[i] = v;
    for (const auto& [v, i] : ring_index) rings[i] = v;

    std::normal_distribution<double> nd(0.0, std::sqrt(std::max(var, 0.0) / 2.0));
    std::vector<double> power(static_cast<std::size_t>(count), 0.0);
    for (int m = 1; m <= cfg.n_subcarriers; ++m) {
        const double km = wavenumber(subcarrier_freq(cfg, m));
        const SteeringVector h = ch.per_subcarrier[m - 1] * inv_root_n;
        const Eigen::MatrixXcd resp =
            linear_phase_matrix(cfg, -km * thetas) * quadratic_phase_matrix(cfg, -km * rings, &h);
        for (long g = 0; g < count; ++g) {
            const auto gi = static_cast<std::size_t>(g);
            cdouble y = resp(cell[gi].first, cell[gi].second);
            if (var > 0.0) {
                const double re = nd(rng);
                y += cdouble(re, nd(rng));
            }
            power[gi] += std::norm(y);
        }
    }
    const auto best = static_cast<std::size_t>(std::max_element(power.begin(), power.end()) - power.begin());
    TrainingEstimate est;
    est.theta_hat = codebook.location(best).theta;
    est.alpha_hat = codebook.location(best).alpha;
    est.codeword = static_cast<long>(best);
    est.scheme = "exhaustive";
    est.pilots_used = static_cast<int>(count);
    finish(est);
    return est;
}

TdPsParams rainbow_params(const SystemConfig& cfg, double alpha_ring) {
    const double r1 = cfg.carrier_freq / subcarrier_freq(cfg, 1);
    const double rM = cfg.carrier_freq / subcarrier_freq(cfg, cfg.n_subcarriers);
    if (!(r1 > rM)) throw std::invalid_argument("rainbow sweep needs at least two distinct subcarriers");
    TdPsParams p;
    p.theta_p = 2.0 / (r1 - rM);
    p.theta_t = 1.0 - r1 * p.theta_p;
    p.alpha_t = alpha_ring;
    return p;
}

namespace {

struct RainbowHit {
    double magnitude = -1.0;
    int m = 0;
    int ring = 0;
};

RainbowHit sweep_ring(const Channel& ch, const SystemConfig& cfg, const TdPsParams& prm, double var, Rng& rng) {
    RainbowHit hit;
    for (int m = 1; m <= cfg.n_subcarriers; ++m) {
        const SteeringVector w = combined_beamformer(prm, cfg, subcarrier_freq(cfg, m));
        const cdouble y = bilinear(ch.per_subcarrier[m - 1], w);
        const double mag = std::abs(y + complex_noise(var, rng));
        if (mag > hit.magnitude) {
            hit.magnitude = mag;
            hit.m = m;
        }
    }
    return hit;
}

}  // namespace

TrainingEstimate nearfield_rainbow_train(const Channel& ch, const SystemConfig& cfg, int S, double snr, Rng& rng,
                                         int budget) {
    if (S < 1) throw std::invalid_argument("rainbow training needs S >= 1");
    const int rings = budget < 0 ? S : std::min(budget, S);
    if (rings < 1) throw std::invalid_argument("rainbow training needs at least one pilot");
    const double var = noise_variance(cfg, ch, snr);
    RainbowHit best;
    for (int s = 0; s < rings; ++s) {
        RainbowHit hit = sweep_ring(ch, cfg, rainbow_params(cfg, cell_center(cfg.alpha_min(), cfg.alpha_max(), s, S)), var, rng);
        hit.ring = s;
        if (hit.magnitude > best.magnitude) best = hit;
    }
    const double ring = cell_center(cfg.alpha_min(), cfg.alpha_max(), best.ring, S);
    FocusOptions opt;
    opt.forced_p = 0;
    const BeamFocus f = nearest_focus(rainbow_params(cfg, ring), cfg, best.m, opt);
    TrainingEstimate est;
    est.theta_hat = f.theta;
    est.alpha_hat = ring;
    est.m_hat = best.m;
    est.k_hat = best.ring + 1;
    est.scheme = "nf_rainbow";
    est.pilots_used = rings;
    est.clamped = f.clamped;
    finish(est);
    return est;
}

TrainingEstimate farfield_rainbow_train(const Channel& ch, const SystemConfig& cfg, double snr, Rng& rng) {
    const double var = noise_variance(cfg, ch, snr);
    const TdPsParams prm = rainbow_params(cfg, 0.0);
    const RainbowHit hit = sweep_ring(ch, cfg, prm, var, rng);
    FocusOptions opt;
    opt.forced_p = 0;
    const BeamFocus f = nearest_focus(prm, cfg, hit.m, opt);
    TrainingEstimate est;
    est.theta_hat = f.theta;
    est.alpha_hat = 0.0;
    est.m_hat = hit.m;
    est.k_hat = 1;
    est.scheme = "ff_rainbow";
    est.pilots_used = 1;
    est.clamped = f.clamped;
    finish(est);
    return est;
}

SteeringVector serve_beamformer(const TrainingEstimate& est, const SystemConfig& cfg, int m) {
    return approx_steering(cfg, {est.theta_hat, est.alpha_hat}, subcarrier_freq(cfg, m)).conjugate();
}

SteeringVector perfect_csi_beamformer(const Channel& ch, int m) {
    const SteeringVector& h = ch.per_subcarrier.at(static_cast<std::size_t>(m - 1));
    const double n = h.norm();
    if (!(n > 0.0)) throw std::invalid_argument("perfect CSI needs a non-zero channel");
    return h.conjugate() / n;
}

}  // namespace ddbs
