#pragma once

#include "pbmkit/bodies.hpp"
#include "pbmkit/counterexamples.hpp"
#include "pbmkit/intrinsic.hpp"
#include "pbmkit/sphere.hpp"
#include "pbmkit/test_function.hpp"
#include "pbmkit/variation.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace pbm {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

const char* library_version();

Json grid_to_json(const SphericalGrid& grid);
/// Throws ConfigurationError on a missing field or an unknown schema version.
SphericalGrid grid_from_json(const Json& j);

Json test_function_to_json(const TestFunction& psi);
TestFunction test_function_from_json(const Json& j);

/// Named test functions in R^n scaled by `amplitude`: "const" (psi = 1),
/// "x1sq", "x1sq-centered" (x_1^2 - 1/n), "harm4". Any other string is parsed
/// as a JSON test-function document.
TestFunction test_function_from_name(const std::string& name, int n, double amplitude);

/// {"type": "ball", "radius": R}, {"type": "box", "a": [...]},
/// {"type": "embedded_cube", "n": n, "indices": [1-based]},
/// {"type": "log_perturbed_ball", "psi": {...}, "s": s},
/// {"type": "wulff_sampled", "grid": {...}, "gauge": [...]}.
Json body_to_json(const Body& body);
Body body_from_json(const Json& j);

Json to_json(const IntrinsicVolumeResult& r);
Json to_json(const ConcavityReport& r);
Json to_json(const Verdict& v);
Json to_json(const PoincareResult& r);
Json to_json(const IbpResult& r);
Json to_json(const Threshold& t);

/// RFC-4180 field quoting.
std::string csv_field(const std::string& s);
/// Shortest round-trip representation of a double.
std::string format_double(double v);
void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Two columns (s, H).
void write_concavity_csv(std::ostream& out, const ConcavityReport& r);
/// n,k,branch,pbar,p,lhs_bound,rhs,margin,conclusion (V_k scale).
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace pbm
