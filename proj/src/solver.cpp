#include "patchweave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "patchweave/errors.hpp"
#include "patchweave/log.hpp"

namespace patchweave {

void SolverConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ArgumentError("lambda must be >= 0");
  if (!(h > 0.0) || !std::isfinite(h)) throw ArgumentError("h must be positive");
  if (!(sigma >= 0.0)) throw ArgumentError("sigma must be >= 0");
  if (!(tol > 0.0)) throw ArgumentError("tol must be positive");
  if (max_iters < 1) throw ArgumentError("max_iters must be at least 1");
  search.validate();
}

double default_h(double sigma) noexcept {
  const double s = sigma > 0.0 ? sigma : kNoiseFloorSigma;
  return 2.0 * s * s;
}

double default_lambda(double h, double sigma) noexcept {
  const double s = sigma > 0.0 ? sigma : kNoiseFloorSigma;
  return h / (s * s);
}

SolverConfig default_config(double sigma, int patch_radius) {
  if (!(sigma >= 0.0)) throw ArgumentError("sigma must be >= 0");
  SolverConfig cfg;
  cfg.sigma = sigma;
  cfg.kernel = make_gaussian_kernel(patch_radius, default_kernel_width(patch_radius));
  cfg.h = default_h(sigma);
  cfg.lambda = default_lambda(cfg.h, sigma);
  return cfg;
}

WeightDomain weight_domain(SolverMode mode) noexcept {
  switch (mode) {
    case SolverMode::coupled: return WeightDomain::all;
    case SolverMode::inpainting: return WeightDomain::extended_hole;
    case SolverMode::denoising: return WeightDomain::known;
  }
  return WeightDomain::all;
}

std::vector<std::uint8_t> frozen_pixels(const RegionMask& mask, const SolverConfig& cfg) {
  std::vector<std::uint8_t> f(mask.size(), 0);
  if (cfg.mode == SolverMode::denoising)
    for (std::size_t i = 0; i < mask.size(); ++i) f[i] = mask.hole(i) ? 1 : 0;
  return f;
}

std::vector<double> fidelity_weights(const RegionMask& mask, const SolverConfig& cfg) {
  std::vector<double> lam(mask.size(), 0.0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const bool in = cfg.fidelity_region == FidelityRegion::known ? mask.known(i)
                                                                 : mask.extended_known(i);
    if (in && !(cfg.mode == SolverMode::denoising && mask.hole(i))) lam[i] = cfg.lambda;
  }
  return lam;
}

namespace {

RegionMask aligned_mask(const RegionMask& mask, const PatchKernel& k) {
  return mask.patch_radius() == k.radius() ? mask : dilate_mask(mask, k.radius());
}

ImageGrid mollified(const ImageGrid& u, const Mollifier& m) { return m.is_delta() ? u : mollify(u, m); }

Pixel to_pixel(std::size_t i, int width) {
  return {static_cast<int>(i / static_cast<std::size_t>(width)),
          static_cast<int>(i % static_cast<std::size_t>(width))};
}

// Per-pixel sum_y w(x,y) eps(x,y).
std::vector<double> weighted_distances(const ImageGrid& u, const WeightField& w,
                                       const PatchKernel& k, const Mollifier& m) {
  if (u.width() != w.width() || u.height() != w.height())
    throw ConfigError("weight field does not match the image size");
  const PaddedImage p(mollified(u, m), k.radius());
  const std::size_t N = u.size();
  std::vector<double> out(N, 0.0);
  const int W = u.width();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t xi = 0; xi < static_cast<std::ptrdiff_t>(N); ++xi) {
    const auto x = static_cast<std::size_t>(xi);
    const auto c = w.candidates(x);
    const auto v = w.weights(x);
    const Pixel px = to_pixel(x, W);
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) s += v[j] * patch_distance(p, px, to_pixel(c[j], W), k);
    out[x] = s;
  }
  return out;
}

double ordered_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

EnergyBreakdown energy(const ImageGrid& u, const WeightField& w, const ImageGrid& v,
                       const RegionMask& mask, const SolverConfig& cfg) {
  check_same_shape(u, v);
  check_same_shape(u, mask);
  const RegionMask mk = aligned_mask(mask, cfg.kernel);
  const auto lam = fidelity_weights(mk, cfg);
  EnergyBreakdown e;
  double fid = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    fid += lam[i] * d * d;
  }
  e.fidelity = 0.5 * fid;
  e.entropy_term = cfg.h * entropy(w);
  e.patch_term = ordered_sum(weighted_distances(u, w, cfg.kernel, cfg.mollifier));
  e.total = e.fidelity + e.entropy_term + e.patch_term;
  return e;
}

std::vector<double> em_surrogate_terms(const ImageGrid& u, const WeightField& w,
                                       const PatchKernel& k, double h, const Mollifier& m) {
  if (!(h > 0.0)) throw ArgumentError("h must be positive");
  auto terms = weighted_distances(u, w, k, m);
  const double log_norm = 0.5 * static_cast<double>(k.size()) * std::log(std::numbers::pi * h);
  for (std::size_t x = 0; x < terms.size(); ++x) {
    if (!w.has_distribution(x)) continue;
    double mass = 0.0, ent = 0.0;
    for (double v : w.weights(x)) {
      mass += v;
      if (v > 0.0) ent += v * std::log(v);
    }
    terms[x] = terms[x] / h + log_norm * mass + ent;
  }
  return terms;
}

double em_surrogate(const ImageGrid& u, const WeightField& w, const PatchKernel& k, double h,
                    const Mollifier& m) {
  return ordered_sum(em_surrogate_terms(u, w, k, h, m));
}

double mixture_neg_log_likelihood(const ImageGrid& u, const RegionMask& mask, const PatchKernel& k,
                                  double h, const SearchConfig& search, WeightDomain domain,
                                  const Mollifier& m) {
  check_same_shape(u, mask);
  if (!(h > 0.0)) throw ArgumentError("h must be positive");
  const RegionMask mk = aligned_mask(mask, k);
  if (mk.extended_count() == mk.size()) throw ArgumentError("no candidate patch centers: O~^c is empty");
  const CandidateLayout layout = build_candidate_layout(mk, search, domain);
  const auto dist = layout_distances(u, layout, k, m);
  const double log_norm = 0.5 * static_cast<double>(k.size()) * std::log(std::numbers::pi * h);
  double total = 0.0;
  for (std::size_t x = 0; x < u.size(); ++x) {
    const std::size_t b = layout.offsets[x], e = layout.offsets[x + 1];
    if (b == e) continue;
    double dmin = dist[b];
    for (std::size_t j = b; j < e; ++j) dmin = std::min(dmin, dist[j]);
    double s = 0.0;
    for (std::size_t j = b; j < e; ++j) s += std::exp(-(dist[j] - dmin) / h);
    // -ln sum exp(-eps/h) = dmin/h - ln sum exp(-(eps - dmin)/h)
    total += log_norm + dmin / h - std::log(s);
  }
  return total;
}

WeightField closed_form_weights(const WeightField& f) {
  std::vector<double> w(f.all_weights().begin(), f.all_weights().end());
  for (std::size_t x = 0; x < f.pixel_count(); ++x) {
    const std::size_t b = f.offsets()[x], e = f.offsets()[x + 1];
    if (b == e) continue;
    double sum = 0.0;
    for (std::size_t j = b; j < e; ++j) {
      if (!(w[j] >= 0.0) || !std::isfinite(w[j]))
        throw ArgumentError("closed-form weights need finite nonnegative entries");
      sum += w[j];
    }
    if (!(sum > 0.0) || !std::isfinite(sum))
      throw ArgumentError("row " + std::to_string(x) + " has zero total mass");
    for (std::size_t j = b; j < e; ++j) w[j] /= sum;
  }
  return WeightField(f.width(), f.height(),
                     std::vector<std::size_t>(f.offsets().begin(), f.offsets().end()),
                     std::vector<std::uint32_t>(f.all_candidates().begin(), f.all_candidates().end()),
                     std::move(w));
}

LogSumCheck logsum_min_oracle(const Eigen::MatrixXd& f, int probes, std::uint64_t seed) {
  const auto rows = static_cast<std::size_t>(f.rows()), cols = static_cast<std::size_t>(f.cols());
  if (rows == 0 || cols == 0) throw ArgumentError("empty matrix");
  if (!(f.array() > 0.0).all() || !f.allFinite())
    throw ArgumentError("log-sum identity needs a strictly positive finite matrix");

  // One row per matrix row, candidates 0..cols-1.
  std::vector<std::size_t> offsets(rows + 1);
  std::vector<std::uint32_t> cand(rows * cols);
  std::vector<double> vals(rows * cols);
  for (std::size_t x = 0; x < rows; ++x) {
    offsets[x + 1] = (x + 1) * cols;
    for (std::size_t y = 0; y < cols; ++y) {
      cand[x * cols + y] = static_cast<std::uint32_t>(y);
      vals[x * cols + y] = f(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    }
  }
  const WeightField wstar = closed_form_weights(
      WeightField(1, static_cast<int>(rows), std::move(offsets), std::move(cand), std::move(vals)));

  const Eigen::MatrixXd logf = f.array().log().matrix();
  auto objective = [&](auto&& weight_at) {
    double p = 0.0;
    for (std::size_t x = 0; x < rows; ++x)
      for (std::size_t y = 0; y < cols; ++y) {
        const double w = weight_at(x, y);
        p -= logf(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) * w;
        if (w > 0.0) p += w * std::log(w);
      }
    return p;
  };

  LogSumCheck out;
  for (Eigen::Index x = 0; x < f.rows(); ++x) out.lhs -= std::log(f.row(x).sum());
  out.rhs = objective([&](std::size_t x, std::size_t y) { return wstar.weights(x)[y]; });

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  Eigen::MatrixXd w(f.rows(), f.cols());
  out.min_probe = std::numeric_limits<double>::infinity();
  for (int t = 0; t < probes; ++t) {
    // Exponential draws normalized per row are uniform on the simplex.
    for (Eigen::Index x = 0; x < w.rows(); ++x) {
      for (Eigen::Index y = 0; y < w.cols(); ++y) w(x, y) = expo(rng);
      w.row(x) /= w.row(x).sum();
    }
    out.min_probe = std::min(out.min_probe, objective([&](std::size_t x, std::size_t y) {
      return w(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    }));
  }
  out.probes = probes;
  return out;
}

ImageGrid update_image(const ImageGrid& u, const WeightField& w, const ImageGrid& v,
                       const RegionMask& mask, const SolverConfig& cfg) {
  check_same_shape(u, v);
  check_same_shape(u, mask);
  if (u.width() != w.width() || u.height() != w.height())
    throw ConfigError("weight field does not match the image size");
  const RegionMask mk = aligned_mask(mask, cfg.kernel);
  const auto lam = fidelity_weights(mk, cfg);
  const auto frozen = frozen_pixels(mk, cfg);

  const PatchKernel& k = cfg.kernel;
  const int r = k.radius(), W = u.width(), H = u.height();
  const std::size_t N = u.size(), B = k.size();
  const auto offs = k.offsets();
  const PaddedImage p(u, r);

  // Transposed field: for each candidate y the (x, w) pairs pointing at it.
  std::vector<std::size_t> toff(N + 1, 0);
  for (std::uint32_t y : w.all_candidates()) ++toff[y + 1];
  for (std::size_t i = 0; i < N; ++i) toff[i + 1] += toff[i];
  std::vector<std::uint32_t> tsrc(w.nnz());
  std::vector<double> tw(w.nnz());
  {
    std::vector<std::size_t> fill(toff.begin(), toff.end() - 1);
    for (std::size_t x = 0; x < N; ++x) {
      const auto c = w.candidates(x);
      const auto wv = w.weights(x);
      for (std::size_t j = 0; j < c.size(); ++j) {
        const std::size_t slot = fill[c[j]]++;
        tsrc[slot] = static_cast<std::uint32_t>(x);
        tw[slot] = wv[j];
      }
    }
  }

  // R[p][z]: weighted mean of the partner patch at offset z, over both roles
  // p plays (patch center x, or candidate y). Q[p]: the matching weight mass.
  std::vector<double> R(N * B, 0.0), Q(N, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pi = 0; pi < static_cast<std::ptrdiff_t>(N); ++pi) {
    const auto pix = static_cast<std::size_t>(pi);
    double* rp = R.data() + pix * B;
    double mass = 0.0;
    const auto c = w.candidates(pix);
    const auto wv = w.weights(pix);
    for (std::size_t j = 0; j < c.size(); ++j) {
      const Pixel y = to_pixel(c[j], W);
      mass += wv[j];
      for (std::size_t z = 0; z < B; ++z) rp[z] += wv[j] * p.at(y.row + offs[z].drow, y.col + offs[z].dcol);
    }
    for (std::size_t t = toff[pix]; t < toff[pix + 1]; ++t) {
      const Pixel x = to_pixel(tsrc[t], W);
      mass += tw[t];
      for (std::size_t z = 0; z < B; ++z) rp[z] += tw[t] * p.at(x.row + offs[z].drow, x.col + offs[z].dcol);
    }
    Q[pix] = mass;
  }

  // Preimages of each coordinate under i -> extend(i + d), per axis and offset.
  auto preimages = [&](int n) {
    std::vector<std::vector<std::vector<int>>> pre(static_cast<std::size_t>(2 * r + 1),
                                                   std::vector<std::vector<int>>(static_cast<std::size_t>(n)));
    for (int d = -r; d <= r; ++d)
      for (int i = 0; i < n; ++i)
        pre[static_cast<std::size_t>(d + r)][static_cast<std::size_t>(extend_index(i + d, n, u.boundary_policy()))]
            .push_back(i);
    return pre;
  };
  const auto pre_row = preimages(H);
  const auto pre_col = preimages(W);

  ImageGrid out(W, H, 0.0, u.boundary_policy());
  std::vector<std::ptrdiff_t> bad_in_row(static_cast<std::size_t>(H), -1);
#pragma omp parallel for schedule(static)
  for (int qr = 0; qr < H; ++qr) {
    for (int qc = 0; qc < W; ++qc) {
      const std::size_t q = out.index(qr, qc);
      if (frozen[q]) {
        out[q] = u[q];
        continue;
      }
      double num = 0.0, den = 0.0;
      for (std::size_t z = 0; z < B; ++z) {
        const double g = k.weights()[z];
        const auto& rows = pre_row[static_cast<std::size_t>(offs[z].drow + r)][static_cast<std::size_t>(qr)];
        const auto& cols = pre_col[static_cast<std::size_t>(offs[z].dcol + r)][static_cast<std::size_t>(qc)];
        for (int pr : rows)
          for (int pc : cols) {
            const std::size_t src = out.index(pr, pc);
            num += g * R[src * B + z];
            den += g * Q[src];
          }
      }
      const double denom = 2.0 * den + lam[q];
      if (!(denom > 0.0)) {
        if (bad_in_row[static_cast<std::size_t>(qr)] < 0)
          bad_in_row[static_cast<std::size_t>(qr)] = static_cast<std::ptrdiff_t>(qc);
        out[q] = u[q];
        continue;
      }
      out[q] = (2.0 * num + lam[q] * v[q]) / denom;
    }
  }
  for (int qr = 0; qr < H; ++qr)
    if (bad_in_row[static_cast<std::size_t>(qr)] >= 0)
      throw SolverError("no weight mass and no fidelity (widen the search window or use multiscale)",
                        qr, static_cast<int>(bad_in_row[static_cast<std::size_t>(qr)]));
  return out;
}

ImageGrid update_image(const SolverState& state, const ImageGrid& v, const RegionMask& mask,
                       const SolverConfig& cfg) {
  return update_image(state.u, state.w, v, mask, cfg);
}

namespace {

SolverState step(SolverState state, const ImageGrid& v, const RegionMask& mask,
                 const SolverConfig& cfg, const CandidateLayout& layout) {
  state.w = update_weights(state.u, layout, cfg.kernel, cfg.h, cfg.search.top_k, cfg.mollifier);
  ImageGrid next = update_image(state.u, state.w, v, mask, cfg);
  if (!next.all_finite()) throw SolverError("non-finite pixel after the image step");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) {
    const double d = next[i] - state.u[i];
    num += d * d;
    den += state.u[i] * state.u[i];
  }
  const double rel = den > 0.0 ? num / den : (num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  state.u = std::move(next);
  ++state.iter;
  EnergyBreakdown e = energy(state.u, state.w, v, mask, cfg);
  e.iter = state.iter;
  e.rel_change = rel;
  if (!std::isfinite(e.total))
    throw SolverError("non-finite energy at iteration " + std::to_string(state.iter) +
                      " (fidelity " + std::to_string(e.fidelity) + ", entropy " +
                      std::to_string(e.entropy_term) + ", patch " + std::to_string(e.patch_term) + ")");
  state.trace.push_back(e);
  return state;
}

void check_inputs(const ImageGrid& v, const RegionMask& mask, const SolverConfig& cfg,
                  const ImageGrid& u) {
  cfg.validate();
  check_same_shape(v, mask);
  check_same_shape(v, u);
  if (!u.all_finite()) throw ArgumentError("iterate must be finite everywhere");
}

}  // namespace

SolverState iterate(SolverState state, const ImageGrid& v, const RegionMask& mask,
                    const SolverConfig& cfg) {
  check_inputs(v, mask, cfg, state.u);
  const RegionMask mk = aligned_mask(mask, cfg.kernel);
  const CandidateLayout layout = build_candidate_layout(mk, cfg.search, weight_domain(cfg.mode));
  return step(std::move(state), v, mk, cfg, layout);
}

SolverState solve(const ImageGrid& v, const RegionMask& mask, const SolverConfig& cfg,
                  const ImageGrid& u0) {
  check_inputs(v, mask, cfg, u0);
  const RegionMask mk = aligned_mask(mask, cfg.kernel);
  SearchConfig search = cfg.search;
  CandidateLayout layout;
  for (;;) {
    try {
      layout = build_candidate_layout(mk, search, weight_domain(cfg.mode));
      break;
    } catch (const EmptyCandidateSetError& e) {
      if (search.search_radius == SearchConfig::unbounded)
        throw SolverError("no candidate patch centers anywhere in the image", e.row(), e.col());
      const int grown = search.search_radius >= std::max(v.width(), v.height()) / 2
                            ? SearchConfig::unbounded
                            : 2 * search.search_radius;
      log_warning(std::string(e.what()) + "; widening search radius to " +
                  (grown == SearchConfig::unbounded ? std::string("unbounded") : std::to_string(grown)));
      search.search_radius = grown;
    }
  }

  SolverState state;
  state.u = u0;
  for (int n = 0; n < cfg.max_iters; ++n) {
    state = step(std::move(state), v, mk, cfg, layout);
    if (state.trace.back().rel_change < cfg.tol) {
      state.converged = true;
      break;
    }
  }
  return state;
}

ImageGrid initial_fill(const ImageGrid& v, const RegionMask& mask, int window) {
  check_same_shape(v, mask);
  if (window < 1) throw ArgumentError("fill window must be positive");
  const int W = v.width(), H = v.height();
  std::vector<double> sum(static_cast<std::size_t>(W + 1) * static_cast<std::size_t>(H + 1), 0.0);
  std::vector<std::size_t> cnt(sum.size(), 0);
  auto at = [W](int r, int c) {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(W + 1) + static_cast<std::size_t>(c);
  };
  double total = 0.0;
  std::size_t total_cnt = 0;
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c) {
      const std::size_t i = v.index(r, c);
      const bool k = mask.known(i);
      sum[at(r + 1, c + 1)] = sum[at(r, c + 1)] + sum[at(r + 1, c)] - sum[at(r, c)] + (k ? v[i] : 0.0);
      cnt[at(r + 1, c + 1)] = cnt[at(r, c + 1)] + cnt[at(r + 1, c)] - cnt[at(r, c)] + (k ? 1 : 0);
      if (k) {
        total += v[i];
        ++total_cnt;
      }
    }
  if (total_cnt == 0) throw ConfigError("mask leaves no known pixels");
  const double global_mean = total / static_cast<double>(total_cnt);

  ImageGrid u = v;
  const int half = window / 2;
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c) {
      const std::size_t i = v.index(r, c);
      if (mask.known(i)) continue;
      const int r0 = std::max(0, r - half), r1 = std::min(H, r + half + 1);
      const int c0 = std::max(0, c - half), c1 = std::min(W, c + half + 1);
      const std::size_t n = cnt[at(r1, c1)] - cnt[at(r0, c1)] - cnt[at(r1, c0)] + cnt[at(r0, c0)];
      const double s = sum[at(r1, c1)] - sum[at(r0, c1)] - sum[at(r1, c0)] + sum[at(r0, c0)];
      u[i] = n ? s / static_cast<double>(n) : global_mean;
    }
  return u;
}

void write_trace_csv(std::ostream& out, const std::vector<EnergyBreakdown>& trace) {
  out << "iter,fidelity,entropy,patch,total,rel_change\n";
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& e : trace)
    out << e.iter << ',' << e.fidelity << ',' << e.entropy_term << ',' << e.patch_term << ','
        << e.total << ',' << e.rel_change << '\n';
  out.precision(old);
}

}  // namespace patchweave
