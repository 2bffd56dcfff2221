// latred: batch front-end over bracketed matrix files.
//
// Exit codes: 0 success, 1 domain/input error, 2 usage error.

#include <CLI11.hpp>

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "latred.hpp"

namespace {

using namespace latred;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "53bits", "53", "200digits", "single", "double", "quad".
PrecisionCtx parse_precision(const std::string& text) {
  std::string s;
  for (char c : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "single") return PrecisionCtx::single();
  if (s == "double") return PrecisionCtx::double_precision();
  if (s == "quad") return PrecisionCtx::quad();
  std::size_t pos = 0;
  long value = 0;
  try {
    value = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("invalid precision '" + text + "'");
  }
  const std::string unit = s.substr(pos);
  try {
    if (unit.empty() || unit == "bits" || unit == "bit" || unit == "b") return PrecisionCtx(value);
    if (unit == "digits" || unit == "digit" || unit == "d") return PrecisionCtx::from_decimal_digits(value);
  } catch (const DomainError& e) {
    throw UsageError(std::string("invalid precision: ") + e.what());
  }
  throw UsageError("invalid precision unit in '" + text + "'");
}

// Flag, then LATRED_PRECISION, then the dimension heuristic.
PrecisionCtx resolve_precision(const std::string& flag, std::size_t n) {
  if (!flag.empty()) return parse_precision(flag);
  if (const char* env = std::getenv("LATRED_PRECISION"); env && *env) return parse_precision(env);
  return default_precision(n);
}

std::string fmt(const MPFloat& x, int digits = 10) { return x.to_string(digits); }

std::string vec_str(const IntVector& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += v[i].get_str();
  }
  return s + "]";
}

// Summary goes to stdout unless stdout carries the basis.
std::ostream& summary_stream(const std::string& out_path) { return out_path == "-" ? std::cerr : std::cout; }

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(item, &pos);
      if (pos != item.size() || v <= 0) throw std::invalid_argument(item);
      out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw UsageError(std::string("invalid ") + what + " list entry '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what + " list");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

struct ReduceOpts {
  std::string algo = "bkz";
  double delta = 0.99;
  std::size_t beta = 20;
  std::size_t max_tours = 40;
  std::string precision;
  bool progress = false;
  std::string in, out;
};

int cmd_reduce(const ReduceOpts& o) {
  const Basis b = read_basis_file(o.in);
  const PrecisionCtx ctx = resolve_precision(o.precision, b.rank());
  const auto start = Clock::now();
  Basis result;
  std::size_t tours = 0, insertions = 0;
  bool converged = true;
  if (o.algo == "lll") {
    LLLParams p;
    p.delta = o.delta;
    p.ctx = ctx;
    result = lll_reduce(b, p).basis;
  } else {
    BKZParams p;
    p.delta = o.delta;
    p.beta = std::min(o.beta, b.rank());
    p.ctx = ctx;
    p.max_tours = o.max_tours;
    if (o.progress)
      p.on_tour = [](const TourReport& t) {
        std::cerr << "tour=" << t.tour << " b1_norm=" << fmt(t.b1_norm) << " insertions=" << t.insertions
                  << " enum_nodes=" << t.profile.enum_nodes << '\n';
      };
    BKZOutcome out = bkz_reduce(b, p);
    result = std::move(out.basis);
    tours = out.tours_completed;
    insertions = out.insertions;
    converged = out.converged;
  }
  const double ms = to_ms(Clock::now() - start);
  write_basis_file(o.out, result);
  const BoundReport rep = approximation_ratio(result, ctx);
  summary_stream(o.out) << "algo=" << o.algo << " n=" << result.rank() << " precision_bits=" << ctx.bits()
                        << " delta=" << o.delta << (o.algo == "bkz" ? " beta=" + std::to_string(std::min(o.beta, b.rank())) : "")
                        << " b1_norm=" << fmt(rep.achieved_norm) << " bound=" << fmt(rep.minkowski_bound)
                        << " bound_ratio=" << fmt(rep.ratio, 6) << " tours=" << tours << " insertions=" << insertions
                        << " converged=" << (converged ? "true" : "false") << " time_ms=" << ms << '\n';
  return 0;
}

// Enumerates on an LLL-reduced copy unless `raw`; coefficients are always
// reported against the input basis.
int cmd_svp(const std::string& in, const std::optional<std::string>& radius, const std::string& precision,
            std::optional<std::uint64_t> budget, bool raw) {
  const Basis b = read_basis_file(in);
  const PrecisionCtx ctx = resolve_precision(precision, b.rank());
  Basis work = b;
  if (!raw) {
    LLLParams lp;
    lp.ctx = ctx;
    work = lll_reduce(b, lp).basis;
  }
  EnumRequest req;
  req.r_block = qr_decompose(work, ctx, QrOptions{false, false}).r;
  if (radius) {
    try {
      req.radius_sq = MPFloat(std::stod(*radius), ctx);
    } catch (const std::exception&) {
      throw UsageError("invalid radius '" + *radius + "'");
    }
  } else {
    const MPFloat bound = minkowski_bound(b.rank(), det_lattice(b), ctx);
    req.radius_sq = bound * bound * MPFloat(1.05 * 1.05, ctx);
  }
  req.node_budget = budget;
  auto res = enumerate_shortest(req);
  if (!res) {
    std::cout << "found=false radius_sq=" << fmt(req.radius_sq) << " nodes=0\n";
    return 0;
  }
  const IntVector v = combine(work, 0, res->coeffs);
  const auto coeffs = lattice_coordinates(b, v);
  if (!coeffs) throw ConsistencyError("enumerated vector is not in the input lattice");
  const BigInt exact = norm_sq(v);
  std::cout << "found=true coeffs=" << vec_str(*coeffs) << " vector=" << vec_str(v) << " norm_sq=" << exact.get_str()
            << " norm=" << fmt(mpf_sqrt(mpf_from_bigint(exact, ctx), ctx)) << " nodes=" << res->nodes_visited
            << " precision_bits=" << ctx.bits() << '\n';
  return 0;
}

int cmd_bound(const std::string& in, const std::string& precision) {
  const Basis b = read_basis_file(in);
  const PrecisionCtx ctx = resolve_precision(precision, b.rank());
  const LatticeDet d = det_lattice(b);
  const BoundReport rep = approximation_ratio(b, ctx);
  std::cout << "n=" << b.rank() << " det" << (d.is_sqrt ? "_sq=" : "=") << d.value.get_str()
            << " minkowski_bound=" << fmt(rep.minkowski_bound) << " b1_norm=" << fmt(rep.achieved_norm)
            << " ratio=" << fmt(rep.ratio, 6) << " target=" << fmt(rep.target, 6) << " met=" << (rep.met ? "true" : "false")
            << '\n';
  return 0;
}

int cmd_check(const std::string& a, const std::string& b, double delta, const std::string& precision) {
  const Basis in = read_basis_file(a);
  const Basis out = read_basis_file(b);
  const PrecisionCtx ctx = precision.empty() ? PrecisionCtx::quad() : parse_precision(precision);
  const ReductionCheck c = verify_reduction(in, out, delta, ctx);
  std::cout << "same_lattice=" << (c.same_lattice ? "true" : "false")
            << " size_reduced=" << (c.size_reduced ? "true" : "false") << " lovasz=" << (c.lovasz ? "true" : "false")
            << " delta=" << delta << '\n';
  if (!c.ok()) {
    std::cerr << "latred: check failed: " << c.detail << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latred: lattice basis reduction (LLL, BKZ, enumeration)"};
  app.require_subcommand(1);

  ReduceOpts ro;
  auto* reduce = app.add_subcommand("reduce", "LLL or BKZ reduce a basis");
  reduce->add_option("--algo", ro.algo, "lll or bkz")->check(CLI::IsMember({"lll", "bkz"}));
  reduce->add_option("--delta", ro.delta, "Lovasz parameter in (0.25, 1]");
  reduce->add_option("--beta", ro.beta, "BKZ block size");
  reduce->add_option("--max-tours", ro.max_tours, "BKZ tour limit");
  reduce->add_option("--precision", ro.precision, "QR precision: Nbits, Ndigits, single, double, quad");
  reduce->add_flag("--progress", ro.progress, "print one line per BKZ tour on stderr");
  reduce->add_option("IN", ro.in, "input basis or -")->required();
  reduce->add_option("OUT", ro.out, "output basis or -")->required();

  std::string svp_in, svp_prec;
  std::optional<std::string> svp_radius;
  std::optional<std::uint64_t> svp_budget;
  auto* svp = app.add_subcommand("svp", "shortest vector by enumeration");
  svp->add_option("--radius", svp_radius, "squared search radius (default 1.05^2 * Minkowski bound^2)");
  svp->add_option("--precision", svp_prec, "QR precision");
  svp->add_option("--node-budget", svp_budget, "abort after this many enumeration nodes");
  bool svp_raw = false;
  svp->add_flag("--raw", svp_raw, "enumerate on the input basis without LLL preprocessing");
  svp->add_option("IN", svp_in, "input basis or -")->required();

  std::string bound_in, bound_prec;
  auto* bound = app.add_subcommand("bound", "Minkowski bound and current ratio");
  bound->add_option("--precision", bound_prec, "evaluation precision");
  bound->add_option("IN", bound_in, "input basis or -")->required();

  GenSpec gs;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Goldstein-Mayer random lattice");
  gen->add_option("--dim", gs.dimension, "dimension")->required();
  gen->add_option("--bits", gs.bit_size, "modulus bits (default 10*dim)");
  gen->add_option("--seed", gs.seed, "64-bit seed");
  gen->add_option("OUT", gen_out, "output file or -")->required();

  std::string prof_dims = "20,30,40", prof_prec, prof_out = "-";
  std::size_t prof_beta = 20, jobs = 1;
  std::uint64_t prof_seed = 0;
  auto* profile = app.add_subcommand("profile", "per-stage timing CSV across dimensions");
  profile->add_option("--dims", prof_dims, "comma-separated dimensions");
  profile->add_option("--beta", prof_beta, "BKZ block size");
  profile->add_option("--seed", prof_seed, "generator seed");
  profile->add_option("--precision", prof_prec, "QR precision (default per dimension)");
  profile->add_option("--jobs", jobs, "worker threads");
  profile->add_option("--out", prof_out, "CSV destination or -");

  std::string sw_dims = "20,30,40,50", sw_precs = "53,113,256,664", sw_out = "-";
  std::size_t sw_beta = 20, sw_bits = 0;
  std::uint64_t sw_seed = 0;
  auto* sweep = app.add_subcommand("sweep", "QR precision sweep CSV");
  sweep->add_option("--dims", sw_dims, "comma-separated dimensions");
  sweep->add_option("--precisions", sw_precs, "comma-separated mantissa bits");
  sweep->add_option("--beta", sw_beta, "BKZ block size");
  sweep->add_option("--bits", sw_bits, "modulus bits (default 10*dim)");
  sweep->add_option("--seed", sw_seed, "generator seed");
  sweep->add_option("--jobs", jobs, "worker threads");
  sweep->add_option("--out", sw_out, "CSV destination or -");

  std::string chk_a, chk_b, chk_prec;
  double chk_delta = 0.99;
  auto* check = app.add_subcommand("check", "audit OUT as a reduction of IN");
  check->add_option("--delta", chk_delta, "Lovasz parameter to verify");
  check->add_option("--precision", chk_prec, "recomputation precision (default 113 bits)");
  check->add_option("IN", chk_a, "original basis")->required();
  check->add_option("OUT", chk_b, "reduced basis")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*reduce) return cmd_reduce(ro);
    if (*svp) return cmd_svp(svp_in, svp_radius, svp_prec, svp_budget, svp_raw);
    if (*bound) return cmd_bound(bound_in, bound_prec);
    if (*gen) {
      write_basis_file(gen_out, generate(gs));
      return 0;
    }
    if (*profile) {
      BKZParams p;
      p.beta = prof_beta;
      std::optional<PrecisionCtx> ctx;
      if (!prof_prec.empty()) ctx = parse_precision(prof_prec);
      const auto rows = profile_dimensions(parse_list<std::size_t>(prof_dims, "dimension"), prof_seed, p, jobs, ctx);
      std::ostringstream csv;
      write_profile_csv(csv, rows);
      write_text(prof_out, csv.str());
      return 0;
    }
    if (*sweep) {
      BKZParams p;
      p.beta = sw_beta;
      std::vector<GenSpec> specs;
      for (std::size_t d : parse_list<std::size_t>(sw_dims, "dimension")) specs.push_back(GenSpec{d, sw_bits, sw_seed});
      const auto rows = precision_sweep(specs, parse_list<long>(sw_precs, "precision"), p, jobs);
      std::ostringstream csv;
      write_sweep_csv(csv, rows);
      write_text(sw_out, csv.str());
      return 0;
    }
    if (*check) return cmd_check(chk_a, chk_b, chk_delta, chk_prec);
  } catch (const UsageError& e) {
    std::cerr << "latred: usage: " << e.what() << '\n';
    return 2;
  } catch (const EnumBudgetExceeded& e) {
    std::cerr << "latred: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "latred: error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
