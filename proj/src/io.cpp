#include "strata/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "strata/error.hpp"

namespace strata::io {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::Parse, std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get_as(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("field '") + key + "': " + e.what());
  }
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json finite_list(const std::vector<double>& values) {
  Json out = Json::array();
  for (double v : values) out.push_back(finite_or_null(v));
  return out;
}

Json optional_matrix(const Matrix& a) { return a.size() == 0 ? Json(nullptr) : to_json(a); }

Matrix matrix_or_empty(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return Matrix();
  return matrix_from_json(j.at(key));
}

Vector vector_from_json(const Json& j) {
  const Matrix m = matrix_from_json(j);
  if (m.cols() != 1) throw Error(ErrorKind::Parse, "expected a column vector record");
  return m.col(0);
}

Json subspace_list(const std::vector<Subspace>& list) {
  Json out = Json::array();
  for (const auto& s : list) out.push_back(to_json(s));
  return out;
}

std::vector<Subspace> subspaces_from(const Json& j, const char* key, const ToleranceConfig& tol) {
  std::vector<Subspace> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_array()) throw Error(ErrorKind::Parse, std::string("field '") + key + "' must be a list");
  for (const auto& item : j.at(key)) out.push_back(subspace_from_json(item, tol));
  return out;
}

}  // namespace

Json to_json(const Matrix& a) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) data.push_back(a(i, j));
  }
  Json out;
  out["rows"] = a.rows();
  out["cols"] = a.cols();
  out["data"] = std::move(data);
  return out;
}

Matrix matrix_from_json(const Json& j) {
  const auto rows = get_as<long>(j, "rows");
  const auto cols = get_as<long>(j, "cols");
  const Json& data = field(j, "data");
  if (rows < 0 || cols < 0) throw Error(ErrorKind::Parse, "negative matrix shape");
  if (!data.is_array() || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw Error(ErrorKind::Parse, "matrix data must hold rows*cols numbers");
  }
  Matrix out(rows, cols);
  std::size_t idx = 0;
  for (long i = 0; i < rows; ++i) {
    for (long c = 0; c < cols; ++c) {
      const Json& v = data[idx++];
      if (!v.is_number()) throw Error(ErrorKind::Parse, "matrix entries must be numbers");
      out(i, c) = v.get<double>();
    }
  }
  return out;
}

Json to_json(const Subspace& s) {
  Json out = to_json(s.basis());
  out["subspace"] = true;
  out["ambient_dim"] = s.ambient_dim();
  return out;
}

Subspace subspace_from_json(const Json& j, const ToleranceConfig& tol) {
  const Matrix basis = matrix_from_json(j);
  if (j.contains("ambient_dim") && get_as<long>(j, "ambient_dim") != basis.rows()) {
    throw Error(ErrorKind::Parse, "ambient_dim disagrees with the basis rows");
  }
  if (basis.cols() == 0) return Subspace(static_cast<int>(basis.rows()));
  if (j.contains("subspace") && j.at("subspace") == true) return Subspace::from_basis(basis, tol);
  return Subspace::span_of(basis, tol);
}

Json to_json(const GraphParam& g) {
  Json out;
  out["domain"] = to_json(g.domain);
  out["codomain"] = to_json(g.codomain);
  out["coeff"] = to_json(g.coeff);
  return out;
}

GraphParam graph_param_from_json(const Json& j, const ToleranceConfig& tol) {
  return GraphParam::make(subspace_from_json(field(j, "domain"), tol), subspace_from_json(field(j, "codomain"), tol),
                          matrix_from_json(field(j, "coeff")), tol);
}

Json to_json(const ToleranceConfig& tol) {
  Json out;
  out["rank_rel_tol"] = tol.rank_rel_tol;
  out["membership_cond_max"] = tol.membership_cond_max;
  return out;
}

Json to_json(const InstanceSpec& spec) {
  Json out;
  out["kind"] = std::string(to_string(spec.kind));
  out["m"] = spec.m;
  out["n"] = spec.n;
  out["k"] = spec.k;
  out["seed"] = spec.seed;
  return out;
}

InstanceSpec instance_spec_from_json(const Json& j) {
  InstanceSpec spec;
  spec.kind = instance_kind_from_string(get_as<std::string>(j, "kind"));
  spec.m = get_as<int>(j, "m");
  spec.n = get_as<int>(j, "n");
  spec.k = get_as<int>(j, "k");
  spec.seed = get_as<std::uint64_t>(j, "seed");
  return spec;
}

Json to_json(const Instance& inst) {
  Json out = to_json(inst.spec);
  if (!inst.matrices.empty()) {
    Json list = Json::array();
    for (const auto& m : inst.matrices) list.push_back(to_json(m));
    out["matrices"] = std::move(list);
  }
  if (!inst.subspaces.empty()) out["subspaces"] = subspace_list(inst.subspaces);
  return out;
}

Instance instance_from_json(const Json& j, const ToleranceConfig& tol) {
  Instance inst{instance_spec_from_json(j), {}, {}};
  if (j.contains("matrices")) {
    for (const auto& m : j.at("matrices")) inst.matrices.push_back(matrix_from_json(m));
  }
  inst.subspaces = subspaces_from(j, "subspaces", tol);
  return inst;
}

Json to_json(const OperatorPath& p) {
  Json segments = Json::array();
  for (const auto& seg : p.segments()) {
    Json s;
    s["kind"] = std::string(seg.kind());
    s["reversed"] = seg.reversed;
    std::visit(Overloaded{
                   [&](const AffineSegment& x) {
                     s["a"] = to_json(x.a);
                     s["b"] = to_json(x.b);
                   },
                   [&](const LeftAffineSegment& x) {
                     s["a"] = to_json(x.a);
                     s["b"] = to_json(x.b);
                     s["c"] = to_json(x.c);
                   },
                   [&](const RightAffineSegment& x) {
                     s["c"] = to_json(x.c);
                     s["a"] = to_json(x.a);
                     s["b"] = to_json(x.b);
                   },
                   [&](const RotationFlipSegment& x) {
                     s["side"] = x.side == FlipSide::Range ? "range" : "kernel";
                     s["base"] = to_json(x.base);
                     s["u"] = to_json(Matrix(x.u));
                     s["w"] = to_json(Matrix(x.w));
                     s["z"] = to_json(Matrix(x.z));
                   },
                   [&](const SpdLineSegment& x) {
                     s["q"] = to_json(x.q);
                     s["s"] = to_json(x.s);
                     s["left"] = optional_matrix(x.left);
                     s["right"] = optional_matrix(x.right);
                   },
                   [&](const RotationLogSegment& x) {
                     s["k"] = to_json(x.k);
                     s["m"] = to_json(x.m);
                     s["left"] = optional_matrix(x.left);
                     s["right"] = optional_matrix(x.right);
                   },
                   [&](const ConstantSegment& x) { s["a"] = to_json(x.a); },
               },
               seg.payload);
    segments.push_back(std::move(s));
  }
  Json out;
  out["shape"] = Json::array({p.rows(), p.cols()});
  out["start"] = to_json(p.start());
  out["end"] = to_json(p.end());
  out["segments"] = std::move(segments);
  return out;
}

OperatorPath path_from_json(const Json& j) {
  const Json& list = field(j, "segments");
  if (!list.is_array() || list.empty()) throw Error(ErrorKind::Parse, "a path needs at least one segment");
  std::vector<PathSegment> segments;
  for (const Json& s : list) {
    const auto kind = get_as<std::string>(s, "kind");
    PathSegment seg;
    seg.reversed = s.contains("reversed") && s.at("reversed").get<bool>();
    if (kind == "affine") {
      seg.payload = AffineSegment{matrix_from_json(field(s, "a")), matrix_from_json(field(s, "b"))};
    } else if (kind == "left-affine") {
      seg.payload = LeftAffineSegment{matrix_from_json(field(s, "a")), matrix_from_json(field(s, "b")),
                                      matrix_from_json(field(s, "c"))};
    } else if (kind == "right-affine") {
      seg.payload = RightAffineSegment{matrix_from_json(field(s, "c")), matrix_from_json(field(s, "a")),
                                       matrix_from_json(field(s, "b"))};
    } else if (kind == "rotation-flip") {
      const auto side = get_as<std::string>(s, "side");
      if (side != "range" && side != "kernel") throw Error(ErrorKind::Parse, "unknown flip side '" + side + "'");
      seg.payload = RotationFlipSegment{matrix_from_json(field(s, "base")), vector_from_json(field(s, "u")),
                                        vector_from_json(field(s, "w")), vector_from_json(field(s, "z")),
                                        side == "range" ? FlipSide::Range : FlipSide::Kernel};
    } else if (kind == "spd-line") {
      seg.payload = SpdLineSegment{matrix_from_json(field(s, "q")), matrix_from_json(field(s, "s")),
                                   matrix_or_empty(s, "left"), matrix_or_empty(s, "right")};
    } else if (kind == "rotation-log") {
      seg.payload = RotationLogSegment{matrix_from_json(field(s, "k")), matrix_from_json(field(s, "m")),
                                       matrix_or_empty(s, "left"), matrix_or_empty(s, "right")};
    } else if (kind == "constant") {
      seg.payload = ConstantSegment{matrix_from_json(field(s, "a"))};
    } else {
      throw Error(ErrorKind::Parse, "unknown segment kind '" + kind + "'");
    }
    segments.push_back(std::move(seg));
  }
  if (j.contains("start") && j.contains("end")) {
    return OperatorPath(std::move(segments), matrix_from_json(j.at("start")), matrix_from_json(j.at("end")));
  }
  return OperatorPath(std::move(segments));
}

Json to_json(const PathCertificate& c) {
  Json out;
  out["instance"] = c.instance ? to_json(*c.instance) : Json(nullptr);
  out["grid_size"] = c.grid_size;
  out["expected_k"] = c.expected_k;
  out["tol"] = to_json(c.tol);
  Json samples = Json::array();
  for (const auto& s : c.samples) {
    Json r;
    r["t"] = s.t;
    r["segment"] = s.segment;
    r["local_t"] = s.local_t;
    r["rank"] = s.rank;
    r["sigma_k"] = s.sigma_k;
    r["sigma_k_plus_1"] = s.sigma_k_plus_1 ? Json(*s.sigma_k_plus_1) : Json(nullptr);
    r["gap_ratio"] = finite_or_null(s.gap_ratio);
    Json membership;
    membership["range_conditions"] = finite_list(s.range_conditions);
    membership["kernel_conditions"] = finite_list(s.kernel_conditions);
    membership["kernel_angles"] = finite_list(s.kernel_angles);
    r["membership_residuals"] = std::move(membership);
    r["pass"] = s.pass;
    samples.push_back(std::move(r));
  }
  out["per_sample"] = std::move(samples);
  out["endpoint_errors"] = Json::array({c.endpoint_errors.first, c.endpoint_errors.second});
  out["verdict"] = std::string(to_string(c.verdict));
  out["failures"] = c.failures;
  return out;
}

Json to_json(const AuditReport& r) {
  Json out = to_json(r.certificate);
  Json audit;
  audit["degenerate"] = r.degenerate;
  audit["fails_at_flip_midpoint"] = r.fails_at_flip_midpoint();
  Json failures = Json::array();
  for (const auto& f : r.failures) failures.push_back(Json{{"segment", f.segment}, {"local_t", f.local_t}});
  audit["failures"] = std::move(failures);
  out["audit"] = std::move(audit);
  return out;
}

Json to_json(const TangentBasis& b) {
  Json out;
  out["at"] = to_json(b.at.op);
  out["k"] = b.at.k;
  out["dim"] = b.dim;
  Json basis = Json::array();
  for (const auto& e : b.basis) basis.push_back(to_json(e));
  out["basis"] = std::move(basis);
  return out;
}

MembershipSpec membership_from_json(const Json& j, const ToleranceConfig& tol) {
  MembershipSpec out;
  if (j.is_array()) {
    for (const auto& item : j) out.range_complements.push_back(subspace_from_json(item, tol));
    return out;
  }
  if (j.is_object() && j.contains("rows")) {
    out.range_complements.push_back(subspace_from_json(j, tol));
    return out;
  }
  out.range_complements = subspaces_from(j, "range_complements", tol);
  out.kernel_complements = subspaces_from(j, "kernel_complements", tol);
  out.kernel_equals = subspaces_from(j, "kernel_equals", tol);
  return out;
}

Json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, "'" + path.string() + "': " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Parse, "cannot write '" + path.string() + "'");
  out << dump(j);
}

}  // namespace strata::io
