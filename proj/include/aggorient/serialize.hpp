#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aggorient/correspondence.hpp"
#include "aggorient/dirstats.hpp"
#include "aggorient/geometry.hpp"
#include "aggorient/orientation.hpp"
#include "aggorient/shapecat.hpp"
#include "aggorient/simgen.hpp"

namespace aggorient {

using Json = nlohmann::ordered_json;

Json encode(const Vec2& v);
Json encode(const RigidTransform& t);
Json encode(const Correspondence& mu);
Json encode(const MatchResult& m);
Json encode(const PairMatchResult& m);
Json encode(const AggregationRecord& r);
Json encode(const SimParams& p);
Json encode(const SimTruth& t);
Json encode(const EstimateErrors& e);
Json encode(const FourFoldVonMises& p);
Json encode(const FitResult& f);
Json encode(const TestReport& r);
/// Members, representative and aspect ratio; the reference points are not embedded.
Json encode(const ShapeCategory& c);

Vec2 decode_vec2(const Json& j);
RigidTransform decode_rigid(const Json& j);
AggregationRecord decode_record(const Json& j);
SimParams decode_sim_params(const Json& j);
SimTruth decode_truth(const Json& j);
FourFoldVonMises decode_von_mises(const Json& j);

/// One aggregation of a dataset directory.
struct DatasetCase {
  std::string id;
  std::filesystem::path dir;  // holds x.csv, y.csv, z.csv and optionally truth.json
  std::string category_x;
  std::string category_y;
};

struct Dataset {
  std::filesystem::path root;
  Json params;  // generator parameters when the dataset was simulated, else null
  std::vector<CategoryRef> categories;
  std::vector<DatasetCase> cases;

  const CategoryRef* category(const std::string& id) const;
};

/// Writes manifest.json, categories/<id>.csv and cases/<id>/{x,y,z}.csv plus
/// truth.json. Every file goes through an atomic rename.
void write_dataset(const std::filesystem::path& root, const SimParams& p,
                   const std::vector<SimCase>& cases, const Json& config);

/// Reads manifest.json and the category reference shapes; point sets of the
/// cases are left on disk.
Dataset read_dataset(const std::filesystem::path& root);

/// Loads the truth.json of a case when present.
std::optional<SimTruth> read_truth(const DatasetCase& c);

/// One JSON value per line; blank lines are skipped.
std::vector<Json> read_json_lines(const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace aggorient
