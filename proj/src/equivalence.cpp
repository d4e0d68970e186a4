#include "lueq/equivalence.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "lueq/realign_factor.hpp"
#include "lueq/tensor_ops.hpp"

namespace lueq {
namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string subset_text(const std::vector<int>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(s[i]);
  }
  out += "}";
  return out;
}

// Empty set, singletons, and (n <= 4) pairs, in that order.
std::vector<std::vector<int>> pt_candidates(int n) {
  std::vector<std::vector<int>> cands;
  cands.push_back({});
  for (int k = 1; k <= n; ++k) cands.push_back({k});
  if (n <= 4)
    for (int j = 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k) cands.push_back({j, k});
  return cands;
}

struct PtSelection {
  std::vector<int> subset;
  bool mismatch = false;
  std::vector<int> mismatch_subset;
};

PtSelection pt_select_impl(const MultipartiteState& s1, const MultipartiteState& s2,
                           double tol_cluster, double tol_spectrum) {
  PtSelection sel;
  int best_r = -1, best_s = 0;
  bool have = false;
  for (const auto& cand : pt_candidates(s1.dims().n())) {
    const MultipartiteState t1 = cand.empty() ? s1 : partial_transpose(s1, cand);
    const MultipartiteState t2 = cand.empty() ? s2 : partial_transpose(s2, cand);
    const Spectrum e1 = eig_hermitian(t1, tol_cluster);
    const Spectrum e2 = eig_hermitian(t2, tol_cluster);
    if (!spectra_compatible(e1.values, e2.values, tol_spectrum)) {
      if (!sel.mismatch) {
        sel.mismatch = true;
        sel.mismatch_subset = cand;
      }
      continue;
    }
    const GaugeBlockStructure st = group_spectrum(e1.values, tol_cluster);
    const int r = st.r();
    const int s = st.s();
    if (!have || r > best_r || (r == best_r && s < best_s)) {
      have = true;
      best_r = r;
      best_s = s;
      sel.subset = cand;
    }
  }
  return sel;
}

std::vector<int> normalize_subset(std::vector<int> subset, int n) {
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  for (int k : subset)
    if (k < 1 || k > n)
      throw std::invalid_argument("partial-transpose subset entry " + std::to_string(k) +
                                  " is outside 1.." + std::to_string(n));
  return subset;
}

}  // namespace

std::vector<int> pt_select(const MultipartiteState& s1, const MultipartiteState& s2,
                           double tol_cluster, double tol_spectrum) {
  if (!(s1.dims() == s2.dims()))
    throw std::invalid_argument("pt_select: subsystem dimensions differ");
  return pt_select_impl(s1, s2, tol_cluster, tol_spectrum).subset;
}

WitnessReport verify_witness(const MultipartiteState& s1, const MultipartiteState& s2,
                             const LocalWitness& w, double tol_verify) {
  if (!(s1.dims() == s2.dims()))
    throw std::invalid_argument("verify_witness: subsystem dimensions differ");
  const MultipartiteDims& dims = s1.dims();
  if (static_cast<int>(w.factors.size()) != dims.n())
    throw std::invalid_argument("verify_witness: expected one factor per subsystem");
  WitnessReport rep;
  for (int k = 0; k < dims.n(); ++k) {
    const ComplexMatrix& u = w.factors[k];
    if (u.rows() != dims.dim(k + 1) || u.cols() != dims.dim(k + 1))
      throw std::invalid_argument("verify_witness: factor " + std::to_string(k + 1) +
                                  " does not match the subsystem dimension");
    const ComplexMatrix dev = u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.cols());
    rep.unitarity_error = std::max(rep.unitarity_error, dev.cwiseAbs().maxCoeff());
  }
  const ComplexMatrix big = tensor_product(w.factors);
  rep.residual = (s2.matrix() - big * s1.matrix() * big.adjoint()).cwiseAbs().maxCoeff();
  rep.ok = rep.residual <= tol_verify && rep.unitarity_error <= tol_verify;
  return rep;
}

EquivalenceVerdict check_equivalence(const MultipartiteState& s1, const MultipartiteState& s2,
                                     const CheckConfig& cfg) {
  if (!(s1.dims() == s2.dims()))
    throw std::invalid_argument("check_equivalence: subsystem dimensions differ");
  const MultipartiteDims& dims = s1.dims();

  EquivalenceVerdict v;

  const Spectrum e1 = eig_hermitian(s1, cfg.tol_cluster);
  const Spectrum e2 = eig_hermitian(s2, cfg.tol_cluster);
  if (!spectra_compatible(e1.values, e2.values, cfg.tol_spectrum)) {
    v.kind = VerdictKind::Inequivalent;
    v.reason = "global spectra differ beyond tolerance " + fmt_g(cfg.tol_spectrum);
    return v;
  }

  const ScreenReport screens = invariant_screens(s1, s2, cfg.pmax);
  if (!screens.all_passed()) {
    const ScreenCheck* fail = screens.first_failure();
    v.kind = VerdictKind::Inequivalent;
    v.reason = "invariant screen failed: " + fail->name +
               (fail->detail.empty() ? "" : " (" + fail->detail + ")");
    return v;
  }

  std::vector<int> subset;
  if (cfg.pt_mode == PtMode::None) {
    subset = {};
  } else if (cfg.pt_mode == PtMode::Forced) {
    subset = normalize_subset(cfg.forced_pt, dims.n());
  } else {
    const PtSelection sel = pt_select_impl(s1, s2, cfg.tol_cluster, cfg.tol_spectrum);
    if (sel.mismatch) {
      v.kind = VerdictKind::Inequivalent;
      v.pt_subset = sel.mismatch_subset;
      v.reason = "partial transpose over " + subset_text(sel.mismatch_subset) +
                 " separates the spectra";
      return v;
    }
    subset = sel.subset;
  }
  v.pt_subset = subset;

  const MultipartiteState t1 = subset.empty() ? s1 : partial_transpose(s1, subset);
  const MultipartiteState t2 = subset.empty() ? s2 : partial_transpose(s2, subset);
  const Spectrum f1 = subset.empty() ? e1 : eig_hermitian(t1, cfg.tol_cluster);
  const Spectrum f2 = subset.empty() ? e2 : eig_hermitian(t2, cfg.tol_cluster);
  if (!subset.empty() && !spectra_compatible(f1.values, f2.values, cfg.tol_spectrum)) {
    v.kind = VerdictKind::Inequivalent;
    v.reason =
        "partial transpose over " + subset_text(subset) + " separates the spectra";
    return v;
  }

  const GaugeBlockStructure structure = group_spectrum(f1.values, cfg.tol_cluster);

  SearchConfig scfg = cfg.search;
  scfg.tol_rank = cfg.tol_rank;
  const SearchResult sr = search_gauge(f1.basis, f2.basis, dims, structure, scfg);
  v.restarts = sr.restarts_used;
  v.best_objective = sr.f_best;
  v.seconds = sr.seconds;

  if (sr.f_best > scfg.objective_target) {
    v.kind = VerdictKind::Undetermined;
    v.reason = "gauge search reached objective " + fmt_g(sr.f_best) + " > target " +
               fmt_g(scfg.objective_target) + "; no product witness certified";
    return v;
  }

  const ComplexMatrix w = f1.basis * assemble_gauge(sr.gauge) * f2.basis.adjoint();
  LocalUnitaryFactorization fac;
  try {
    fac = factor_local_unitary(w, dims, cfg.tol_rank);
  } catch (const RankError& err) {
    v.kind = VerdictKind::Undetermined;
    v.reason = std::string("product factorization failed after the search: ") + err.what();
    return v;
  }

  // The factored unitary maps the transformed rho1 onto the transformed rho2
  // by conjugation with its adjoint; undoing the partial transpose conjugates
  // the factors entrywise on the transposed subsystems.
  LocalWitness witness;
  witness.factors.reserve(fac.factors.size());
  for (int k = 0; k < dims.n(); ++k) {
    ComplexMatrix a = fac.factors[k].adjoint();
    if (std::find(subset.begin(), subset.end(), k + 1) != subset.end()) a = a.conjugate();
    witness.factors.push_back(std::move(a));
  }

  const WitnessReport rep = verify_witness(s1, s2, witness, cfg.tol_verify);
  v.residual = rep.residual;
  if (!rep.ok) {
    v.kind = VerdictKind::Undetermined;
    v.reason = "witness verification residual " + fmt_g(rep.residual) + " exceeds tolerance " +
               fmt_g(cfg.tol_verify);
    return v;
  }

  v.kind = VerdictKind::Equivalent;
  v.witness = std::move(witness);
  v.reason = "local unitary witness verified, residual " + fmt_g(rep.residual);
  return v;
}

}  // namespace lueq
