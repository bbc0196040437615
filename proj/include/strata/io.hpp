#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "strata/builders.hpp"
#include "strata/certify.hpp"
#include "strata/geometry.hpp"

namespace strata::io {

/// Insertion-ordered so that output files are byte-stable.
using Json = nlohmann::ordered_json;

// Matrix: {"rows", "cols", "data"} with data row-major.
Json to_json(const Matrix& a);
Matrix matrix_from_json(const Json& j);

// Subspace: the matrix record of its basis plus "subspace": true and
// "ambient_dim". A plain matrix record is accepted and read as spanning
// columns.
Json to_json(const Subspace& s);
Subspace subspace_from_json(const Json& j, const ToleranceConfig& tol = {});

Json to_json(const GraphParam& g);
GraphParam graph_param_from_json(const Json& j, const ToleranceConfig& tol = {});

Json to_json(const ToleranceConfig& tol);

Json to_json(const InstanceSpec& spec);
InstanceSpec instance_spec_from_json(const Json& j);
/// The spec fields followed by "matrices" or "subspaces".
Json to_json(const Instance& inst);
Instance instance_from_json(const Json& j, const ToleranceConfig& tol = {});

/// {"shape": [r, c], "start", "end", "segments": [...]}; each segment has
/// "kind", "reversed" and its payload matrices. Vectors are n x 1 matrices.
Json to_json(const OperatorPath& p);
OperatorPath path_from_json(const Json& j);

Json to_json(const PathCertificate& c);
Json to_json(const AuditReport& r);

/// {"at", "k", "dim", "basis"}.
Json to_json(const TangentBasis& b);

/// Either {"range_complements": [...], "kernel_complements": [...],
/// "kernel_equals": [...]} (all keys optional), a single subspace record, or
/// a list of them; the last two forms are read as range complements.
MembershipSpec membership_from_json(const Json& j, const ToleranceConfig& tol = {});

/// Throws Error(Parse) when the file cannot be read or parsed.
Json read_file(const std::filesystem::path& path);
/// Two-space indentation and a trailing newline.
void write_file(const std::filesystem::path& path, const Json& j);
std::string dump(const Json& j);

}  // namespace strata::io
