#include "lueq/gauge.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "lueq/realign_factor.hpp"
#include "lueq/tensor_ops.hpp"

namespace lueq {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kTopK = 8;       // grid candidates carried into refinement
constexpr int kExactCap = 64;  // cap on recorded exact grid solutions
const Complex kQuarterPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

double rank1_deficiency(const ComplexMatrix& r) {
  const double total = r.squaredNorm();
  if (total <= 0) return 0.0;
  ComplexMatrix gram;
  if (r.rows() <= r.cols())
    gram.noalias() = r * r.adjoint();
  else
    gram.noalias() = r.adjoint() * r;
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram, Eigen::EigenvaluesOnly);
  return std::max(0.0, 1.0 - es.eigenvalues().maxCoeff() / total);
}

double deficiency_sum(const ComplexMatrix& w, const MultipartiteDims& dims) {
  double f = 0;
  for (int i = 1; i <= dims.n(); ++i) f += rank1_deficiency(realign_bipartition(w, dims, i));
  return f;
}

// Runs body(job) for job = 0..njobs-1, in ascending order when threads == 1.
template <class Body>
void run_workers(int threads, long njobs, Body&& body) {
  if (threads <= 1 || njobs <= 1) {
    for (long j = 0; j < njobs; ++j) body(j);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  const int nt = static_cast<int>(std::min<long>(threads, njobs));
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (long j = next.fetch_add(1); j < njobs; j = next.fetch_add(1)) body(j);
    });
  for (auto& th : pool) th.join();
}

// ---- flat parameter vectors -------------------------------------------------
//
// theta for 1-blocks, (phase, t, z1, z2, z3) for 2-blocks, and the real
// degrees of freedom of the Hermitian generator for larger blocks, with the
// first block's leading scalar (theta / phase / H(0,0)) gauge-fixed to zero.
// A global phase on the gauge leaves the objective invariant, so any gauge can
// be brought to this form before flattening.

struct ParamLayout {
  std::vector<int> start;
  int total = 0;
};

int block_param_count(int m) { return m == 1 ? 1 : (m == 2 ? 5 : m * m); }

ParamLayout layout_for(const GaugeBlockStructure& st) {
  ParamLayout layout;
  for (std::size_t b = 0; b < st.blocks.size(); ++b) {
    int c = block_param_count(st.blocks[b].multiplicity);
    if (b == 0) --c;
    layout.start.push_back(layout.total);
    layout.total += c;
  }
  return layout;
}

void normalize_global_phase(GaugeUnitary& g) {
  if (g.blocks.empty()) return;
  const auto& b0 = g.blocks.front();
  double psi = 0;
  if (b0.multiplicity == 1)
    psi = b0.theta;
  else if (b0.multiplicity == 2)
    psi = b0.phase;
  else
    psi = b0.generator(0, 0).real();
  if (psi == 0) return;
  for (auto& blk : g.blocks) {
    if (blk.multiplicity == 1)
      blk.theta -= psi;
    else if (blk.multiplicity == 2)
      blk.phase -= psi;
    else
      blk.generator -= psi * ComplexMatrix::Identity(blk.multiplicity, blk.multiplicity);
  }
}

RealVector flatten(const GaugeUnitary& gin, const ParamLayout& layout) {
  GaugeUnitary g = gin;
  normalize_global_phase(g);
  RealVector p(layout.total);
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    const auto& blk = g.blocks[b];
    const bool pin = (b == 0);
    int idx = layout.start[b];
    if (blk.multiplicity == 1) {
      if (!pin) p(idx++) = blk.theta;
    } else if (blk.multiplicity == 2) {
      if (!pin) p(idx++) = blk.phase;
      p(idx++) = blk.t;
      p(idx++) = blk.z1;
      p(idx++) = blk.z2;
      p(idx++) = blk.z3;
    } else {
      const int m = blk.multiplicity;
      for (int j = 0; j < m; ++j) {
        if (pin && j == 0) continue;
        p(idx++) = blk.generator(j, j).real();
      }
      for (int j = 0; j < m; ++j)
        for (int k = j + 1; k < m; ++k) {
          p(idx++) = blk.generator(j, k).real();
          p(idx++) = blk.generator(j, k).imag();
        }
    }
  }
  return p;
}

GaugeUnitary unflatten(const RealVector& p, const GaugeBlockStructure& st, const ParamLayout& layout) {
  GaugeUnitary g;
  g.structure = st;
  g.blocks.resize(st.blocks.size());
  for (std::size_t b = 0; b < st.blocks.size(); ++b) {
    const int m = st.blocks[b].multiplicity;
    const bool pin = (b == 0);
    auto& blk = g.blocks[b];
    blk.multiplicity = m;
    int idx = layout.start[b];
    if (m == 1) {
      blk.theta = pin ? 0.0 : p(idx);
    } else if (m == 2) {
      blk.phase = pin ? 0.0 : p(idx++);
      blk.t = p(idx++);
      blk.z1 = p(idx++);
      blk.z2 = p(idx++);
      blk.z3 = p(idx++);
      const double nrm =
          std::sqrt(blk.t * blk.t + blk.z1 * blk.z1 + blk.z2 * blk.z2 + blk.z3 * blk.z3);
      if (nrm < 1e-12) {
        blk.t = 1;
        blk.z1 = blk.z2 = blk.z3 = 0;
      } else {
        blk.t /= nrm;
        blk.z1 /= nrm;
        blk.z2 /= nrm;
        blk.z3 /= nrm;
      }
    } else {
      ComplexMatrix h = ComplexMatrix::Zero(m, m);
      for (int j = 0; j < m; ++j) {
        if (pin && j == 0) continue;
        h(j, j) = p(idx++);
      }
      for (int j = 0; j < m; ++j)
        for (int k = j + 1; k < m; ++k) {
          const double re = p(idx++);
          const double im = p(idx++);
          h(j, k) = Complex(re, im);
          h(k, j) = Complex(re, -im);
        }
      blk.generator = std::move(h);
    }
  }
  return g;
}

// Renormalizes every 2-block quadruple (t, z1, z2, z3) onto the unit sphere.
void project_sphere(RealVector& p, const GaugeBlockStructure& st, const ParamLayout& layout) {
  for (std::size_t b = 0; b < st.blocks.size(); ++b) {
    if (st.blocks[b].multiplicity != 2) continue;
    const int base = layout.start[b] + (b == 0 ? 0 : 1);
    double n2 = 0;
    for (int j = 0; j < 4; ++j) n2 += p(base + j) * p(base + j);
    if (n2 < 1e-24) {
      p(base) = 1;
      p(base + 1) = p(base + 2) = p(base + 3) = 0;
    } else {
      const double inv = 1.0 / std::sqrt(n2);
      for (int j = 0; j < 4; ++j) p(base + j) *= inv;
    }
  }
}

struct Objective {
  const ComplexMatrix& x;
  const ComplexMatrix& y;
  const MultipartiteDims& dims;
  const GaugeBlockStructure& st;
  const ParamLayout& layout;
  long evals = 0;

  double operator()(const RealVector& p) {
    ++evals;
    return deficiency_sum(x * assemble_gauge(unflatten(p, st, layout)) * y.adjoint(), dims);
  }
};

// Finite-difference gradient descent with Armijo backtracking; 2-block
// parameters stay on the unit sphere via projection after every step.
double descend(Objective& obj, RealVector& p, const GaugeBlockStructure& st,
               const ParamLayout& layout, int max_iterations, double target) {
  project_sphere(p, st, layout);
  double f = obj(p);
  if (p.size() == 0) return f;
  const double h = 1e-6;
  double alpha = 0.25;
  RealVector grad(p.size()), probe(p.size()), trial(p.size());
  for (int iter = 0; iter < max_iterations && f > target; ++iter) {
    for (Eigen::Index j = 0; j < p.size(); ++j) {
      probe = p;
      probe(j) = p(j) + h;
      const double fp = obj(probe);
      probe(j) = p(j) - h;
      const double fm = obj(probe);
      grad(j) = (fp - fm) / (2 * h);
    }
    const double g2 = grad.squaredNorm();
    if (g2 < 1e-24) break;
    alpha = std::min(1.0, alpha * 4.0);
    bool accepted = false;
    for (; alpha > 1e-14; alpha *= 0.5) {
      trial = p - alpha * grad;
      project_sphere(trial, st, layout);
      const double ft = obj(trial);
      if (ft <= f - 1e-4 * alpha * g2) {
        p.swap(trial);
        f = ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return f;
}

// Alternating projection between {X U Y^dag : U block-diagonal unitary} and
// the product unitaries. Converges to machine precision from any point close
// enough to a true solution; the caller keeps the result only if it improves.
std::pair<GaugeUnitary, double> alternating_polish(const ComplexMatrix& x, const ComplexMatrix& y,
                                                   const MultipartiteDims& dims,
                                                   const GaugeBlockStructure& st,
                                                   const GaugeUnitary& g0) {
  const int d = st.dimension();
  const auto offs = st.offsets();
  ComplexMatrix u = assemble_gauge(g0);
  for (int it = 0; it < 500; ++it) {
    const ComplexMatrix w = x * u * y.adjoint();
    const ComplexMatrix prod = tensor_product(peel_unchecked(w, dims).factors);
    const ComplexMatrix b = x.adjoint() * prod * y;
    ComplexMatrix unew = ComplexMatrix::Zero(d, d);
    for (std::size_t k = 0; k < st.blocks.size(); ++k) {
      const int m = st.blocks[k].multiplicity;
      const int o = offs[k];
      if (m == 1) {
        const Complex v = b(o, o);
        unew(o, o) = std::abs(v) > 0 ? v / std::abs(v) : Complex(1, 0);
      } else {
        const Eigen::JacobiSVD<ComplexMatrix> svd(b.block(o, o, m, m),
                                                  Eigen::ComputeFullU | Eigen::ComputeFullV);
        unew.block(o, o, m, m).noalias() = svd.matrixU() * svd.matrixV().adjoint();
      }
    }
    const double delta = (unew - u).norm();
    u.swap(unew);
    if (delta < 1e-14) break;
  }
  GaugeUnitary g = gauge_from_matrix(u, st);
  const double f = deficiency_sum(x * assemble_gauge(g) * y.adjoint(), dims);
  return {std::move(g), f};
}

std::vector<int> grid_digits(long idx, int nslots) {
  std::vector<int> dg(nslots, 0);
  for (int k = nslots - 1; k >= 1; --k) {
    dg[k] = static_cast<int>(idx & 3);
    idx >>= 2;
  }
  return dg;
}

ComplexMatrix diag_from_digits(const std::vector<int>& dg, int d) {
  ComplexMatrix u = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) u(k, k) = kQuarterPhase[k < static_cast<int>(dg.size()) ? dg[k] : 0];
  return u;
}

GaugeUnitary digits_to_gauge(const std::vector<int>& dg, const GaugeBlockStructure& st) {
  const auto offs = st.offsets();
  const auto theta_at = [&dg](int k) {
    return (k < static_cast<int>(dg.size()) ? dg[k] : 0) * (kPi / 2);
  };
  GaugeUnitary g;
  g.structure = st;
  for (std::size_t b = 0; b < st.blocks.size(); ++b) {
    const int m = st.blocks[b].multiplicity;
    const int o = offs[b];
    GaugeBlockParams p;
    p.multiplicity = m;
    if (m == 1) {
      p.theta = theta_at(o);
    } else if (m == 2) {
      const double ta = theta_at(o);
      const double tb = theta_at(o + 1);
      p.phase = 0.5 * (ta + tb);
      p.t = std::cos(0.5 * (ta - tb));
      p.z3 = std::sin(0.5 * (ta - tb));
    } else {
      p.generator = ComplexMatrix::Zero(m, m);
      for (int j = 0; j < m; ++j) p.generator(j, j) = theta_at(o + j);
    }
    g.blocks.push_back(std::move(p));
  }
  return g;
}

GaugeUnitary random_gauge(const GaugeBlockStructure& st, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uang(-kPi, kPi);
  std::normal_distribution<double> gauss(0.0, 1.0);
  GaugeUnitary g;
  g.structure = st;
  for (const auto& sb : st.blocks) {
    const int m = sb.multiplicity;
    GaugeBlockParams p;
    p.multiplicity = m;
    if (m == 1) {
      p.theta = uang(rng);
    } else if (m == 2) {
      p.phase = uang(rng);
      double v[4];
      double n2 = 0;
      do {
        n2 = 0;
        for (double& c : v) {
          c = gauss(rng);
          n2 += c * c;
        }
      } while (n2 < 1e-12);
      const double inv = 1.0 / std::sqrt(n2);
      p.t = v[0] * inv;
      p.z1 = v[1] * inv;
      p.z2 = v[2] * inv;
      p.z3 = v[3] * inv;
    } else {
      p.generator = ComplexMatrix::Zero(m, m);
      for (int j = 0; j < m; ++j) p.generator(j, j) = uang(rng);
      const double scale = kPi / (2.0 * std::sqrt(static_cast<double>(m)));
      for (int j = 0; j < m; ++j)
        for (int k = j + 1; k < m; ++k) {
          const Complex z(gauss(rng) * scale, gauss(rng) * scale);
          p.generator(j, k) = z;
          p.generator(k, j) = std::conj(z);
        }
    }
    g.blocks.push_back(std::move(p));
  }
  return g;
}

double trace_score(const ComplexMatrix& w, const MultipartiteDims& dims) {
  const auto fac = peel_unchecked(w, dims);
  double s = 0;
  for (const auto& u : fac.factors) s += std::abs(u.trace());
  return s;
}

struct GridOutcome {
  double best_f = std::numeric_limits<double>::infinity();
  long best_idx = 0;
  std::vector<std::pair<double, long>> top;  // ascending (f, idx), at most kTopK
  std::vector<long> exact;                   // ascending idx, at most kExactCap
  long evaluations = 0;
};

void push_top(std::vector<std::pair<double, long>>& top, double f, long idx) {
  const std::pair<double, long> entry{f, idx};
  auto it = std::lower_bound(top.begin(), top.end(), entry);
  if (it == top.end() && static_cast<int>(top.size()) >= kTopK) return;
  top.insert(it, entry);
  if (static_cast<int>(top.size()) > kTopK) top.pop_back();
}

// Scans all diagonal gauges with per-eigenvector phases in {0, pi/2, pi,
// 3pi/2}, the first phase pinned to zero and at most 12 gridded vectors.
// Realignments are linear in the gauge, so each bipartition's realigned matrix
// is a phase combination of precomputed rank-one contributions.
GridOutcome scan_phase_grid(const ComplexMatrix& x, const ComplexMatrix& y,
                            const MultipartiteDims& dims, double target, int threads) {
  const int d = dims.total();
  const int ncut = dims.n();
  const int nslots = std::min(d, 12);
  const int ngrid = nslots - 1;
  const long npoints = 1L << (2 * ngrid);

  std::vector<ComplexMatrix> base(ncut);
  std::vector<std::vector<ComplexMatrix>> rik(ncut, std::vector<ComplexMatrix>(nslots));
  for (int i = 0; i < ncut; ++i) {
    for (int k = 0; k < d; ++k) {
      const ComplexMatrix wk = x.col(k) * y.col(k).adjoint();
      ComplexMatrix r = realign_bipartition(wk, dims, i + 1);
      if (k == 0) base[i] = ComplexMatrix::Zero(r.rows(), r.cols());
      if (k < nslots)
        rik[i][k] = std::move(r);
      else
        base[i] += r;
    }
  }

  const int nchunks = std::max(1, std::min<int>(threads, static_cast<int>(npoints)));
  std::vector<GridOutcome> parts(nchunks);
  run_workers(nchunks, nchunks, [&](long c) {
    const long lo = npoints * c / nchunks;
    const long hi = npoints * (c + 1) / nchunks;
    GridOutcome& out = parts[c];
    std::vector<int> dg(nslots, 0);
    ComplexMatrix r;
    for (long idx = lo; idx < hi; ++idx) {
      long rem = idx;
      for (int k = nslots - 1; k >= 1; --k) {
        dg[k] = static_cast<int>(rem & 3);
        rem >>= 2;
      }
      double f = 0;
      for (int i = 0; i < ncut; ++i) {
        r = base[i];
        for (int k = 0; k < nslots; ++k) r.noalias() += kQuarterPhase[dg[k]] * rik[i][k];
        f += rank1_deficiency(r);
      }
      ++out.evaluations;
      if (f < out.best_f) {
        out.best_f = f;
        out.best_idx = idx;
      }
      push_top(out.top, f, idx);
      if (f <= target && static_cast<int>(out.exact.size()) < kExactCap) out.exact.push_back(idx);
    }
  });

  GridOutcome merged;
  for (const auto& part : parts) {
    merged.evaluations += part.evaluations;
    if (part.best_f < merged.best_f) {
      merged.best_f = part.best_f;
      merged.best_idx = part.best_idx;
    }
    for (const auto& e : part.top) push_top(merged.top, e.first, e.second);
    for (long idx : part.exact)
      if (static_cast<int>(merged.exact.size()) < kExactCap) merged.exact.push_back(idx);
  }
  return merged;
}

// Canonical representative among grid points that reach the target: maximize
// the summed factor traces (witness closest to the identity), then prefer the
// fewest nonzero phases, then the lexicographically smallest phase pattern.
long select_canonical(const std::vector<long>& exact, int nslots, const ComplexMatrix& x,
                      const ComplexMatrix& y, const MultipartiteDims& dims) {
  const int d = dims.total();
  long chosen = exact.front();
  double best_score = 0;
  int best_nnz = 0;
  bool first = true;
  for (long idx : exact) {
    const std::vector<int> dg = grid_digits(idx, nslots);
    const double score = trace_score(x * diag_from_digits(dg, d) * y.adjoint(), dims);
    const int nnz = static_cast<int>(std::count_if(dg.begin(), dg.end(), [](int v) { return v != 0; }));
    bool better = first;
    if (!first) {
      if (score > best_score + 1e-9)
        better = true;
      else if (score >= best_score - 1e-9 && nnz < best_nnz)
        better = true;
    }
    if (better) {
      chosen = idx;
      best_score = first ? score : std::max(best_score, score);
      best_nnz = nnz;
      first = false;
    }
  }
  return chosen;
}

struct RefineOutcome {
  double f = std::numeric_limits<double>::infinity();
  GaugeUnitary gauge;
  bool valid = false;
  long evaluations = 0;
};

// The polish is attempted before the gradient descent (it is much cheaper and
// closes most basins on its own) and again afterwards when the descent leaves
// a small but nonzero objective.
constexpr double kPolishGate = 5e-2;

RefineOutcome refine_from(const GaugeUnitary& start, const ComplexMatrix& x,
                          const ComplexMatrix& y, const MultipartiteDims& dims,
                          const GaugeBlockStructure& st, const ParamLayout& layout,
                          int max_iterations, double target) {
  Objective obj{x, y, dims, st, layout, 0};

  auto first = alternating_polish(x, y, dims, st, start);
  ++obj.evals;
  if (first.second <= target) return {first.second, std::move(first.first), true, obj.evals};

  RealVector p = flatten(start, layout);
  double f = descend(obj, p, st, layout, max_iterations, target);
  GaugeUnitary g = unflatten(p, st, layout);
  if (first.second < f) {
    f = first.second;
    g = std::move(first.first);
  }
  // A descent that merely reaches the target still benefits from a polish: an
  // objective of 1e-12 leaves a witness residual near 1e-6, while the polish
  // fixed point is machine-exact.
  if (f > 1e-28 && f < kPolishGate) {
    auto polished = alternating_polish(x, y, dims, st, g);
    ++obj.evals;
    if (polished.second < f) {
      f = polished.second;
      g = std::move(polished.first);
    }
  }
  return {f, std::move(g), true, obj.evals};
}

}  // namespace

int thread_budget() {
  if (const char* env = std::getenv("LUEQ_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(std::min(v, 256L));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

GaugeUnitary identity_gauge(const GaugeBlockStructure& structure) {
  GaugeUnitary g;
  g.structure = structure;
  for (const auto& blk : structure.blocks) {
    GaugeBlockParams p;
    p.multiplicity = blk.multiplicity;
    if (blk.multiplicity >= 3)
      p.generator = ComplexMatrix::Zero(blk.multiplicity, blk.multiplicity);
    g.blocks.push_back(std::move(p));
  }
  return g;
}

ComplexMatrix assemble_gauge(const GaugeUnitary& g) {
  if (g.blocks.size() != g.structure.blocks.size())
    throw std::invalid_argument("assemble_gauge: parameter blocks disagree with the structure");
  const int d = g.structure.dimension();
  const auto offs = g.structure.offsets();
  ComplexMatrix u = ComplexMatrix::Zero(d, d);
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    const int m = g.structure.blocks[b].multiplicity;
    const auto& p = g.blocks[b];
    if (p.multiplicity != m)
      throw std::invalid_argument("assemble_gauge: block multiplicity disagrees with the structure");
    const int o = offs[b];
    if (m == 1) {
      u(o, o) = std::exp(Complex(0, p.theta));
    } else if (m == 2) {
      const double nrm = std::sqrt(p.t * p.t + p.z1 * p.z1 + p.z2 * p.z2 + p.z3 * p.z3);
      if (std::abs(nrm - 1.0) > 1e-6)
        throw std::invalid_argument(
            "assemble_gauge: 2-block parameters violate t^2 + |z|^2 = 1 beyond 1e-6");
      const double t = p.t / nrm, z1 = p.z1 / nrm, z2 = p.z2 / nrm, z3 = p.z3 / nrm;
      const Complex ph = std::exp(Complex(0, p.phase));
      u(o, o) = ph * Complex(t, z3);
      u(o, o + 1) = ph * Complex(z1, z2);
      u(o + 1, o) = ph * Complex(-z1, z2);
      u(o + 1, o + 1) = ph * Complex(t, -z3);
    } else {
      if (p.generator.rows() != m || p.generator.cols() != m)
        throw std::invalid_argument("assemble_gauge: generator size disagrees with the multiplicity");
      if ((p.generator - p.generator.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("assemble_gauge: generator is not Hermitian");
      const ComplexMatrix h = 0.5 * (p.generator + p.generator.adjoint());
      const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
      ComplexVector phases(m);
      for (int j = 0; j < m; ++j) phases(j) = std::exp(Complex(0, es.eigenvalues()(j)));
      u.block(o, o, m, m).noalias() =
          es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    }
  }
  return u;
}

GaugeUnitary gauge_from_matrix(const ComplexMatrix& u, const GaugeBlockStructure& structure) {
  const int d = structure.dimension();
  if (u.rows() != d || u.cols() != d)
    throw std::invalid_argument("gauge_from_matrix: matrix size disagrees with the structure");
  const auto offs = structure.offsets();
  GaugeUnitary g;
  g.structure = structure;
  for (std::size_t b = 0; b < structure.blocks.size(); ++b) {
    const int m = structure.blocks[b].multiplicity;
    const int o = offs[b];
    GaugeBlockParams p;
    p.multiplicity = m;
    if (m == 1) {
      p.theta = std::arg(u(o, o));
    } else if (m == 2) {
      const ComplexMatrix blk = u.block(o, o, 2, 2);
      const Complex det = blk(0, 0) * blk(1, 1) - blk(0, 1) * blk(1, 0);
      p.phase = 0.5 * std::arg(det);
      const Complex ph = std::exp(Complex(0, -p.phase));
      const Complex a = ph * blk(0, 0);
      const Complex bb = ph * blk(0, 1);
      const Complex c = ph * blk(1, 0);
      const Complex dd = ph * blk(1, 1);
      p.t = 0.5 * (a.real() + dd.real());
      p.z3 = 0.5 * (a.imag() - dd.imag());
      p.z1 = 0.5 * (bb.real() - c.real());
      p.z2 = 0.5 * (bb.imag() + c.imag());
      const double nrm = std::sqrt(p.t * p.t + p.z1 * p.z1 + p.z2 * p.z2 + p.z3 * p.z3);
      if (nrm < 1e-12) {
        p.t = 1;
        p.z1 = p.z2 = p.z3 = 0;
      } else {
        p.t /= nrm;
        p.z1 /= nrm;
        p.z2 /= nrm;
        p.z3 /= nrm;
      }
    } else {
      const ComplexMatrix blk = u.block(o, o, m, m);
      const Eigen::ComplexSchur<ComplexMatrix> schur(blk);
      ComplexVector angles(m);
      for (int j = 0; j < m; ++j) angles(j) = std::arg(schur.matrixT()(j, j));
      ComplexMatrix h = schur.matrixU() * angles.asDiagonal() * schur.matrixU().adjoint();
      p.generator = 0.5 * (h + h.adjoint());
    }
    g.blocks.push_back(std::move(p));
  }
  return g;
}

double gauge_objective(const ComplexMatrix& x, const ComplexMatrix& y,
                       const MultipartiteDims& dims, const GaugeUnitary& g) {
  const int d = dims.total();
  if (x.rows() != d || x.cols() != d || y.rows() != d || y.cols() != d)
    throw std::invalid_argument("gauge_objective: eigenbasis size disagrees with the dimensions");
  if (g.structure.dimension() != d)
    throw std::invalid_argument("gauge_objective: block structure dimension mismatch");
  return deficiency_sum(x * assemble_gauge(g) * y.adjoint(), dims);
}

SearchResult search_gauge(const ComplexMatrix& x, const ComplexMatrix& y,
                          const MultipartiteDims& dims, const GaugeBlockStructure& structure,
                          const SearchConfig& cfg) {
  const int d = dims.total();
  if (x.rows() != d || x.cols() != d || y.rows() != d || y.cols() != d)
    throw std::invalid_argument("search_gauge: eigenbasis size disagrees with the dimensions");
  if (structure.dimension() != d)
    throw std::invalid_argument("search_gauge: block structure dimension mismatch");

  const auto t0 = std::chrono::steady_clock::now();
  const int threads = thread_budget();
  const ParamLayout layout = layout_for(structure);
  long evaluations = 0;

  SearchResult res;
  std::vector<GaugeUnitary> candidates;

  if (cfg.discrete_phase_grid) {
    const int nslots = std::min(d, 12);
    GridOutcome grid = scan_phase_grid(x, y, dims, cfg.objective_target, threads);
    evaluations += grid.evaluations;
    res.stage1_ran = true;
    res.stage1_f = grid.best_f;
    if (!grid.exact.empty()) {
      const long chosen = select_canonical(grid.exact, nslots, x, y, dims);
      res.stage1_gauge = digits_to_gauge(grid_digits(chosen, nslots), structure);
      res.gauge = res.stage1_gauge;
      res.f_best = gauge_objective(x, y, dims, res.gauge);
      ++evaluations;
      res.stage = "grid";
    } else {
      res.stage1_gauge = digits_to_gauge(grid_digits(grid.best_idx, nslots), structure);
      res.gauge = res.stage1_gauge;
      res.f_best = grid.best_f;
      res.stage = "grid";
      for (const auto& e : grid.top)
        candidates.push_back(digits_to_gauge(grid_digits(e.second, nslots), structure));
    }
  } else {
    res.gauge = identity_gauge(structure);
    res.f_best = gauge_objective(x, y, dims, res.gauge);
    ++evaluations;
    res.stage = "none";
    candidates.push_back(res.gauge);
  }

  if (res.f_best > cfg.objective_target && !candidates.empty()) {
    std::vector<RefineOutcome> out(candidates.size());
    run_workers(threads, static_cast<long>(candidates.size()), [&](long i) {
      out[i] = refine_from(candidates[i], x, y, dims, structure, layout, cfg.max_iterations,
                           cfg.objective_target);
    });
    for (const auto& o : out) {
      evaluations += o.evaluations;
      if (o.valid && o.f < res.f_best) {
        res.f_best = o.f;
        res.gauge = o.gauge;
        res.stage = "refine";
      }
    }
  }

  if (res.f_best > cfg.objective_target && cfg.max_restarts > 0) {
    std::vector<RefineOutcome> out(cfg.max_restarts);
    std::atomic<bool> found{false};
    run_workers(threads, cfg.max_restarts, [&](long r) {
      if (found.load(std::memory_order_relaxed)) return;
      std::seed_seq ss{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu),
                       static_cast<std::uint32_t>(cfg.seed >> 32),
                       static_cast<std::uint32_t>(r + 1)};
      std::mt19937_64 rng(ss);
      out[r] = refine_from(random_gauge(structure, rng), x, y, dims, structure, layout,
                           cfg.max_iterations, cfg.objective_target);
      if (out[r].f <= cfg.objective_target) found.store(true, std::memory_order_relaxed);
    });
    for (std::size_t r = 0; r < out.size(); ++r) {
      if (!out[r].valid) continue;
      ++res.restarts_used;
      evaluations += out[r].evaluations;
      if (out[r].f < res.f_best) {
        res.f_best = out[r].f;
        res.gauge = out[r].gauge;
        res.stage = "restart";
      }
    }
  }

  if (res.f_best < kPolishGate && res.f_best > 1e-28) {
    auto polished = alternating_polish(x, y, dims, structure, res.gauge);
    ++evaluations;
    if (polished.second < res.f_best) {
      res.f_best = polished.second;
      res.gauge = std::move(polished.first);
    }
  }

  res.evaluations = evaluations;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace lueq
