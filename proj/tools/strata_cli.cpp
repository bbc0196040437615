// strata: build and certify paths inside rank strata from the command line.
//
// Exit codes: certify and audit-thm12 return 0/1/2 for pass/fail/degenerate;
// any other error returns 3.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "strata/error.hpp"
#include "strata/io.hpp"

namespace {

using strata::io::Json;

constexpr int kErrorExit = 3;

int run_gen(int m, int n, int k, std::uint64_t seed, const std::string& kind, const std::string& out) {
  strata::InstanceSpec spec{m, n, k, seed, strata::instance_kind_from_string(kind)};
  strata::io::write_file(out, strata::io::to_json(strata::gen_instance(spec)));
  return 0;
}

int run_connect(const std::string& in, const std::string& mode, const std::string& out, bool reverse,
                const strata::ToleranceConfig& tol) {
  const Json input = strata::io::read_file(in);
  std::vector<strata::Matrix> pair;
  std::optional<strata::InstanceSpec> spec;
  if (input.contains("kind")) spec = strata::io::instance_spec_from_json(input);
  if (input.contains("matrices")) {
    for (const auto& m : input.at("matrices")) pair.push_back(strata::io::matrix_from_json(m));
  }
  if (pair.size() != 2) throw strata::Error(strata::ErrorKind::Parse, "connect needs exactly two matrices");
  const strata::Matrix& t1 = pair[0];
  const strata::Matrix& t2 = pair[1];

  std::optional<strata::OperatorPath> path;
  if (mode == "fk") {
    path = strata::connect_fk(t1, t2, tol);
  } else if (mode == "phi") {
    const int k = strata::rank_of(t1, tol);
    path = strata::connect_phi(t1, t2, static_cast<int>(t1.cols()) - k, static_cast<int>(t1.rows()) - k, tol);
  } else {
    const auto witness = strata::discover_chain(t1, t2, tol);
    path = strata::chain_connect(t1, t2, witness, tol);
  }
  if (reverse) path = path->reversed();
  Json doc;
  if (spec) doc["instance"] = strata::io::to_json(*spec);
  doc["mode"] = mode;
  doc["reversed"] = reverse;
  const Json body = strata::io::to_json(*path);
  for (const auto& [key, value] : body.items()) doc[key] = value;
  strata::io::write_file(out, doc);
  return 0;
}

int run_certify(const std::string& path_file, int k, int samples, const strata::ToleranceConfig& tol,
                const std::string& membership_file, const std::string& out) {
  const Json doc = strata::io::read_file(path_file);
  const strata::OperatorPath path = strata::io::path_from_json(doc);
  strata::MembershipSpec membership;
  if (!membership_file.empty()) membership = strata::io::membership_from_json(strata::io::read_file(membership_file), tol);
  strata::PathCertificate cert = strata::certify_path(path, k, samples, tol, membership);
  if (doc.contains("instance")) cert.instance = strata::io::instance_spec_from_json(doc.at("instance"));
  strata::io::write_file(out, strata::io::to_json(cert));
  std::cout << strata::to_string(cert.verdict) << '\n';
  return strata::exit_code(cert.verdict);
}

int run_audit(int dim, std::uint64_t seed, int samples, const strata::ToleranceConfig& tol, const std::string& out) {
  const auto inst = strata::gen_flip_audit_instance(dim, seed);
  const auto path = strata::literal_flip_path(inst.e_star, inst.r, inst.alpha, tol);
  const auto report = strata::audit_flip_path(path, inst.r, samples, tol);
  Json doc = strata::io::to_json(report);
  Json echo;
  echo["dim"] = dim;
  echo["seed"] = seed;
  echo["e_star"] = strata::io::to_json(inst.e_star);
  echo["r"] = strata::io::to_json(inst.r);
  echo["alpha"] = strata::io::to_json(inst.alpha.coeff);
  doc["audit"]["instance"] = std::move(echo);
  strata::io::write_file(out, doc);
  std::cout << strata::to_string(report.certificate.verdict) << '\n';
  return strata::exit_code(report.certificate.verdict);
}

int run_tangent(const std::string& in, const std::string& out, const strata::ToleranceConfig& tol) {
  const strata::Matrix x = strata::io::matrix_from_json(strata::io::read_file(in));
  const auto basis = strata::tangent_basis(strata::StratumPoint::at(x, tol), tol);
  strata::io::write_file(out, strata::io::to_json(basis));
  return 0;
}

int run_flip(const std::string& in, const std::string& out, const strata::ToleranceConfig& tol) {
  const strata::Matrix t = strata::io::matrix_from_json(strata::io::read_file(in));
  const auto path = strata::corrected_flip_path(t, strata::rank_of(t, tol), std::nullopt, tol);
  strata::io::write_file(out, strata::io::to_json(path));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paths and certificates inside rank strata of matrix spaces"};
  app.require_subcommand(1);

  strata::ToleranceConfig tol;
  try {
    tol = strata::ToleranceConfig::from_environment();
  } catch (const strata::Error& e) {
    std::cerr << "strata: " << e.what() << '\n';
    return kErrorExit;
  }

  int m = 0, n = 0, k = 0, dim = 0, samples = 1001;
  std::uint64_t seed = 0;
  std::string kind, in, out, mode = "fk", path_file, membership_file;
  bool reverse = false;

  auto* gen = app.add_subcommand("gen", "Generate a seeded random instance");
  gen->add_option("--m", m, "Domain dimension")->required();
  gen->add_option("--n", n, "Codomain dimension")->required();
  gen->add_option("--k", k, "Rank (or subspace dimension)")->required();
  gen->add_option("--seed", seed, "Generator seed")->required();
  gen->add_option("--kind", kind, "Instance kind")
      ->required()
      ->check(CLI::IsMember({"fk-pair", "phi-pair", "subspace-pair", "gl"}));
  gen->add_option("--out", out, "Output file")->required();

  auto* connect = app.add_subcommand("connect", "Connect two operators of equal rank");
  connect->add_option("--in", in, "Pair file")->required();
  connect->add_option("--mode", mode, "Construction")->check(CLI::IsMember({"fk", "phi", "chain"}));
  connect->add_option("--out", out, "Output path file")->required();
  connect->add_flag("--reverse", reverse, "Run from the first matrix to the second");

  auto* certify = app.add_subcommand("certify", "Certify a path");
  certify->add_option("--path", path_file, "Path file")->required();
  certify->add_option("--k", k, "Expected rank")->required();
  certify->add_option("--samples", samples, "Uniform grid size")->check(CLI::Range(2, 10000000));
  certify->add_option("--tol", tol.rank_rel_tol, "Relative rank tolerance");
  certify->add_option("--membership", membership_file, "Complement subspaces to check");
  certify->add_option("--out", out, "Certificate file")->required();

  auto* audit = app.add_subcommand("audit-thm12", "Audit the literal flip path on a seeded instance");
  audit->add_option("--dim", dim, "Ambient dimension")->required()->check(CLI::Range(2, 64));
  audit->add_option("--seed", seed, "Generator seed")->required();
  audit->add_option("--samples", samples, "Uniform grid size")->check(CLI::Range(2, 10000000));
  audit->add_option("--out", out, "Certificate file")->required();

  auto* tangent = app.add_subcommand("tangent", "Tangent space basis of the rank stratum at X");
  tangent->add_option("--in", in, "Matrix file")->required();
  tangent->add_option("--out", out, "Output file")->required();

  auto* dimcmd = app.add_subcommand("dim", "Dimension of the rank-k stratum");
  dimcmd->add_option("--m", m, "Domain dimension")->required();
  dimcmd->add_option("--n", n, "Codomain dimension")->required();
  dimcmd->add_option("--k", k, "Rank")->required();

  auto* flip = app.add_subcommand("flip", "Rank-preserving path from T to -T");
  flip->add_option("--in", in, "Matrix file")->required();
  flip->add_option("--out", out, "Output path file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kErrorExit;
  }

  try {
    tol.validate();
    if (*gen) return run_gen(m, n, k, seed, kind, out);
    if (*connect) return run_connect(in, mode, out, reverse, tol);
    if (*certify) return run_certify(path_file, k, samples, tol, membership_file, out);
    if (*audit) return run_audit(dim, seed, samples, tol, out);
    if (*tangent) return run_tangent(in, out, tol);
    if (*dimcmd) {
      std::cout << strata::dim_fk(m, n, k) << '\n';
      return 0;
    }
    if (*flip) return run_flip(in, out, tol);
  } catch (const strata::Error& e) {
    std::cerr << "strata: " << e.what() << '\n';
    return kErrorExit;
  } catch (const std::exception& e) {
    std::cerr << "strata: " << e.what() << '\n';
    return kErrorExit;
  }
  return kErrorExit;
}
