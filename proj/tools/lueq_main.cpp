#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "lueq/equivalence.hpp"
#include "lueq/oracle.hpp"
#include "lueq/realign_factor.hpp"
#include "lueq/spectral.hpp"
#include "lueq/state_io.hpp"
#include "lueq/tensor_ops.hpp"
#include "lueq/types.hpp"

// Exit codes: 0/1/2 mirror Equivalent/Inequivalent/Undetermined for `check`
// (success/failure for the other subcommands), 64 usage or file-syntax
// errors, 65 invalid input data, 70 internal errors.
namespace {

using namespace lueq;
using ojson = nlohmann::ordered_json;

constexpr int kExitUsage = 64;
constexpr int kExitBadData = 65;
constexpr int kExitInternal = 70;

void print_matrix(std::ostream& os, const ComplexMatrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      char buf[80];
      std::snprintf(buf, sizeof buf, "  %+.10f%+.10fi", m(r, c).real(), m(r, c).imag());
      os << buf;
    }
    os << "\n";
  }
}

std::string subset_text(const std::vector<int>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(s[i]);
  }
  return out + "}";
}

std::vector<int> parse_pt_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    const std::string piece = text.substr(pos, next - pos);
    try {
      std::size_t used = 0;
      const int v = std::stoi(piece, &used);
      if (used != piece.size() || v < 1) throw std::invalid_argument(piece);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ParseError("--pt expects auto, none, or comma-separated subsystem indices (got \"" +
                       text + "\")");
    }
    pos = next + 1;
  }
  if (out.empty())
    throw ParseError("--pt expects auto, none, or comma-separated subsystem indices");
  return out;
}

ojson matrix_json(const ComplexMatrix& m, const std::vector<int>& dims) {
  ojson o;
  o["dims"] = dims;
  ojson re = ojson::array(), im = ojson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ojson re_row = ojson::array(), im_row = ojson::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re_row.push_back(m(r, c).real());
      im_row.push_back(m(r, c).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  o["re"] = std::move(re);
  o["im"] = std::move(im);
  return o;
}

struct CheckArgs {
  std::string file_a, file_b;
  double tol_cluster = 1e-8;
  double tol_rank = 1e-7;
  double tol_verify = 1e-8;
  int restarts = 64;
  std::uint64_t seed = 0;
  std::string pt = "auto";
  bool json = false;
  std::string witness_out;
};

int run_check(const CheckArgs& args) {
  const MultipartiteState s1 = parse_state(args.file_a);
  const MultipartiteState s2 = parse_state(args.file_b);

  CheckConfig cfg;
  cfg.tol_cluster = args.tol_cluster;
  cfg.tol_rank = args.tol_rank;
  cfg.tol_verify = args.tol_verify;
  cfg.search.max_restarts = args.restarts;
  cfg.search.seed = args.seed;
  cfg.search.tol_rank = args.tol_rank;
  if (args.pt == "auto")
    cfg.pt_mode = PtMode::Auto;
  else if (args.pt == "none")
    cfg.pt_mode = PtMode::None;
  else {
    cfg.pt_mode = PtMode::Forced;
    cfg.forced_pt = parse_pt_list(args.pt);
  }

  const EquivalenceVerdict v = check_equivalence(s1, s2, cfg);
  const char* verdict = v.kind == VerdictKind::Equivalent     ? "Equivalent"
                        : v.kind == VerdictKind::Inequivalent ? "Inequivalent"
                                                              : "Undetermined";

  if (args.json) {
    ojson o;
    o["verdict"] = verdict;
    if (v.residual)
      o["residual"] = *v.residual;
    else
      o["residual"] = nullptr;
    if (v.witness) {
      ojson factors = ojson::array();
      for (const auto& u : v.witness->factors)
        factors.push_back(matrix_json(u, {static_cast<int>(u.rows())}));
      o["witness"] = std::move(factors);
    } else {
      o["witness"] = nullptr;
    }
    o["pt_subset"] = v.pt_subset;
    o["search"] = ojson{{"restarts", v.restarts},
                        {"best_objective", v.best_objective},
                        {"seconds", v.seconds}};
    std::cout << o.dump(2) << "\n";
  } else {
    std::cout << "verdict: " << verdict << "\n";
    std::cout << "reason: " << v.reason << "\n";
    std::cout << "pt subset: " << subset_text(v.pt_subset) << "\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "search: restarts=%d best_objective=%.6g seconds=%.3f",
                  v.restarts, v.best_objective, v.seconds);
    std::cout << buf << "\n";
    if (v.residual) {
      std::snprintf(buf, sizeof buf, "residual: %.6g", *v.residual);
      std::cout << buf << "\n";
    }
    if (v.witness)
      for (std::size_t k = 0; k < v.witness->factors.size(); ++k) {
        std::cout << "witness factor " << k + 1 << ":\n";
        print_matrix(std::cout, v.witness->factors[k]);
      }
  }

  if (!args.witness_out.empty() && v.witness)
    for (std::size_t k = 0; k < v.witness->factors.size(); ++k) {
      const ComplexMatrix& u = v.witness->factors[k];
      write_matrix_file(u, {static_cast<int>(u.rows())}, StateMode::Density,
                        args.witness_out + "." + std::to_string(k + 1) + ".json");
    }

  return v.kind == VerdictKind::Equivalent ? 0 : v.kind == VerdictKind::Inequivalent ? 1 : 2;
}

int run_spectrum(const std::string& file, double tol_cluster) {
  const MultipartiteState s = parse_state(file);
  const Spectrum sp = eig_hermitian(s, tol_cluster);
  const GaugeBlockStructure st = group_spectrum(sp.values, tol_cluster);
  std::cout << "eigenvalues (descending):\n";
  for (Eigen::Index i = 0; i < sp.values.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "  %.12g", sp.values(i));
    std::cout << buf << "\n";
  }
  std::cout << "clusters (value multiplicity):\n";
  for (const auto& b : st.blocks) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "  %.12g %d", b.value, b.multiplicity);
    std::cout << buf << "\n";
  }
  std::cout << "distinct=" << st.r() << " degenerate=" << st.s() << "\n";
  return 0;
}

int run_realign(const std::string& file, int cut) {
  const MatrixFile f = parse_matrix_file(file);
  const MultipartiteDims dims(f.dims);
  if (cut < 1 || cut > dims.n())
    throw std::invalid_argument("realign: --cut must be in 1.." + std::to_string(dims.n()));
  const ComplexMatrix moved = permute_subsystem_front(f.matrix, dims, cut);
  const RealignmentSVD svd =
      realignment_svd(moved, dims.dim(cut), dims.total() / dims.dim(cut));
  std::cout << "singular values:\n";
  for (Eigen::Index i = 0; i < svd.sigma.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "  %.12g", svd.sigma(i));
    std::cout << buf << "\n";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "deficiency: %.6g", svd.deficiency);
  std::cout << buf << "\n";
  return 0;
}

int run_factor(const std::string& file, const std::vector<int>& dims_override, double tol_rank,
               const std::string& out_prefix) {
  const MatrixFile f = parse_matrix_file(file);
  const std::vector<int> raw = dims_override.empty() ? f.dims : dims_override;
  const MultipartiteDims dims(raw);
  if (dims.total() != f.matrix.rows())
    throw std::invalid_argument("factor: dims do not match the matrix size");
  LocalUnitaryFactorization fac;
  try {
    fac = factor_local_unitary(f.matrix, dims, tol_rank);
  } catch (const RankError& e) {
    std::cerr << "not factorable: " << e.what() << "\n";
    return 1;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "residual: %.6g", fac.residual);
  std::cout << buf << "\n";
  for (std::size_t k = 0; k < fac.factors.size(); ++k) {
    std::cout << "factor " << k + 1 << ":\n";
    print_matrix(std::cout, fac.factors[k]);
    if (!out_prefix.empty())
      write_matrix_file(fac.factors[k], {static_cast<int>(fac.factors[k].rows())},
                        StateMode::Density, out_prefix + "." + std::to_string(k + 1) + ".json");
  }
  return 0;
}

int run_ptranspose(const std::string& file, int k, const std::string& out) {
  const MultipartiteState s = parse_state(file);
  if (k < 1 || k > s.dims().n())
    throw std::invalid_argument("ptranspose: --k must be in 1.." + std::to_string(s.dims().n()));
  const MultipartiteState t = partial_transpose(s, {k});
  write_state(t, out);
  std::cout << "wrote partial transpose over {" << k << "} to " << out << "\n";
  return 0;
}

int run_random_pair(const std::vector<int>& dims_list, const std::vector<int>& profile,
                    std::uint64_t seed, const std::string& out1, const std::string& out2,
                    const std::string& factors_out) {
  const MultipartiteDims dims(dims_list);
  const RandomPair pair = random_pair(dims, profile, seed);
  write_state(pair.rho1, out1);
  write_state(pair.rho2, out2);
  if (!factors_out.empty())
    for (std::size_t k = 0; k < pair.planted.size(); ++k)
      write_matrix_file(pair.planted[k], {static_cast<int>(pair.planted[k].rows())},
                        StateMode::Density, factors_out + "." + std::to_string(k + 1) + ".json");
  std::cout << "wrote " << out1 << " and " << out2 << " (seed " << seed << ")\n";
  return 0;
}

int run_verify(const std::string& file_a, const std::string& file_b,
               const std::vector<std::string>& witness_files, double tol_verify) {
  const MultipartiteState s1 = parse_state(file_a);
  const MultipartiteState s2 = parse_state(file_b);
  LocalWitness w;
  for (const auto& path : witness_files) w.factors.push_back(parse_matrix_file(path).matrix);
  const WitnessReport rep = verify_witness(s1, s2, w, tol_verify);
  char buf[120];
  std::snprintf(buf, sizeof buf, "residual: %.6g\nunitarity error: %.6g\nverified: %s",
                rep.residual, rep.unitarity_error, rep.ok ? "yes" : "no");
  std::cout << buf << "\n";
  return rep.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lueq: local unitary equivalence of multipartite mixed states"};
  app.require_subcommand(1);

  CheckArgs check;
  CLI::App* c_check = app.add_subcommand("check", "decide equivalence and emit a witness");
  c_check->add_option("A", check.file_a, "first state file")->required();
  c_check->add_option("B", check.file_b, "second state file")->required();
  c_check->add_option("--tol-cluster", check.tol_cluster, "eigenvalue clustering tolerance");
  c_check->add_option("--tol-rank", check.tol_rank, "realignment rank-1 tolerance");
  c_check->add_option("--tol-verify", check.tol_verify, "witness verification tolerance");
  c_check->add_option("--restarts", check.restarts, "gauge-search restart budget");
  c_check->add_option("--seed", check.seed, "search seed");
  c_check->add_option("--pt", check.pt, "partial transpose: auto, none, or subsystem list");
  c_check->add_flag("--json", check.json, "machine-readable output");
  c_check->add_option("--witness-out", check.witness_out, "write witness factors to PREFIX.k.json");

  std::string sp_file;
  double sp_tol = 1e-8;
  CLI::App* c_spec = app.add_subcommand("spectrum", "print eigenvalues and clusters");
  c_spec->add_option("A", sp_file, "state file")->required();
  c_spec->add_option("--tol-cluster", sp_tol, "eigenvalue clustering tolerance");

  std::string re_file;
  int re_cut = 1;
  CLI::App* c_re = app.add_subcommand("realign", "singular values of a bipartition realignment");
  c_re->add_option("A", re_file, "matrix file")->required();
  c_re->add_option("--cut", re_cut, "1-based subsystem singled out")->required();

  std::string fa_file, fa_out;
  std::vector<int> fa_dims;
  double fa_tol = 1e-7;
  CLI::App* c_fa = app.add_subcommand("factor", "factor a unitary into local factors");
  c_fa->add_option("W", fa_file, "unitary matrix file")->required();
  c_fa->add_option("--dims", fa_dims, "subsystem dimensions")->delimiter(',');
  c_fa->add_option("--tol-rank", fa_tol, "realignment rank-1 tolerance");
  c_fa->add_option("-o,--out", fa_out, "write factors to PREFIX.k.json");

  std::string pt_file, pt_out;
  int pt_k = 1;
  CLI::App* c_pt = app.add_subcommand("ptranspose", "partial transpose of a state");
  c_pt->add_option("A", pt_file, "state file")->required();
  c_pt->add_option("--k", pt_k, "1-based subsystem to transpose")->required();
  c_pt->add_option("-o,--out", pt_out, "output file")->required();

  std::vector<int> rp_dims, rp_profile;
  std::uint64_t rp_seed = 0;
  std::string rp_out1, rp_out2, rp_factors;
  CLI::App* c_rp = app.add_subcommand("random-pair", "seeded equivalent pair generator");
  c_rp->add_option("--dims", rp_dims, "subsystem dimensions")->delimiter(',')->required();
  c_rp->add_option("--profile", rp_profile, "eigenvalue multiplicities")->delimiter(',');
  c_rp->add_option("--seed", rp_seed, "generator seed");
  c_rp->add_option("-1,--o1", rp_out1, "output file for the first state")->required();
  c_rp->add_option("-2,--o2", rp_out2, "output file for the second state")->required();
  c_rp->add_option("--factors-out", rp_factors, "write planted factors to PREFIX.k.json");

  std::string vf_a, vf_b;
  std::vector<std::string> vf_witness;
  double vf_tol = 1e-8;
  CLI::App* c_vf = app.add_subcommand("verify", "verify a claimed witness");
  c_vf->add_option("A", vf_a, "first state file")->required();
  c_vf->add_option("B", vf_b, "second state file")->required();
  c_vf->add_option("--witness", vf_witness, "one factor file per subsystem")->required();
  c_vf->add_option("--tol-verify", vf_tol, "verification tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(c_check)) return run_check(check);
    if (app.got_subcommand(c_spec)) return run_spectrum(sp_file, sp_tol);
    if (app.got_subcommand(c_re)) return run_realign(re_file, re_cut);
    if (app.got_subcommand(c_fa)) return run_factor(fa_file, fa_dims, fa_tol, fa_out);
    if (app.got_subcommand(c_pt)) return run_ptranspose(pt_file, pt_k, pt_out);
    if (app.got_subcommand(c_rp))
      return run_random_pair(rp_dims, rp_profile, rp_seed, rp_out1, rp_out2, rp_factors);
    if (app.got_subcommand(c_vf)) return run_verify(vf_a, vf_b, vf_witness, vf_tol);
  } catch (const lueq::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
