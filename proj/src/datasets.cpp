#include "misstab/datasets.hpp"

namespace misstab {
namespace {

constexpr Pattern kY1 = 1, kY2 = 2, kY3 = 4;

IncompleteTable smoking_birthweight() {
  // Y1 smoking (smoker, non-smoker), Y2 birth weight (< 2500 g, >= 2500 g)
  TableSchema schema({{"Y1", 2}, {"Y2", 2}}, {"Y1", "Y2"});
  return IncompleteTable(schema, {
      Stratum(schema, kY1 | kY2, {4512, 21009, 3394, 24132}),
      Stratum(schema, kY2, {142, 464}),
      Stratum(schema, kY1, {1049, 1135}),
      Stratum(schema, 0, {1224}),
  });
}

IncompleteTable bone_density() {
  // Y1 bone mineral density, Y2 family income
  TableSchema schema({{"Y1", 3}, {"Y2", 3}}, {"Y1", "Y2"});
  return IncompleteTable(schema, {
      Stratum(schema, kY1 | kY2, {621, 290, 284, 260, 131, 117, 93, 30, 18}),
      Stratum(schema, kY2, {456, 156, 266}),
      Stratum(schema, kY1, {135, 69, 27}),
      Stratum(schema, 0, {45}),
  });
}

IncompleteTable spo_full() {
  // Y1 secession, Y2 attendance, Y3 independence; the published table
  // carries 2 in the (1,2,2) full cell in place of the original 0
  TableSchema schema({{"Y1", 2}, {"Y2", 2}, {"Y3", 2}}, {"Y1", "Y2", "Y3"});
  return IncompleteTable(schema, {
      Stratum(schema, kY1 | kY2 | kY3, {1191, 8, 8, 2, 158, 68, 7, 14}),
      Stratum(schema, kY1 | kY2, {21, 4, 29, 3}),
      Stratum(schema, kY1 | kY3, {107, 3, 18, 43}),
      Stratum(schema, kY2 | kY3, {90, 2, 1, 2}),
      Stratum(schema, kY1, {9, 31}),
      Stratum(schema, kY2, {109, 25}),
      Stratum(schema, kY3, {19, 8}),
      Stratum(schema, 0, {96}),
  });
}

IncompleteTable spo_y1() {
  const Pattern keep[] = {kY1 | kY2 | kY3, kY2 | kY3};
  return subtable(spo_full(), keep);
}

IncompleteTable spo_y1y2() {
  const Pattern keep[] = {kY1 | kY2 | kY3, kY2 | kY3, kY1 | kY3, kY3};
  return subtable(spo_full(), keep);
}

}  // namespace

const std::vector<DatasetInfo>& builtin_datasets() {
  static const std::vector<DatasetInfo> list = {
      {"smoking-birthweight", "2x2x2x2: maternal smoking by birth weight, both variables missing"},
      {"bone-density", "3x3x2x2: bone mineral density by family income, both variables missing"},
      {"spo-full", "2x2x2x2x2x2: Slovenian public opinion survey, all three variables missing"},
      {"spo-y1", "2x2x2x2: SPO subtable with only Y1 missing"},
      {"spo-y1y2", "2x2x2x2x2: SPO subtable with Y1 and Y2 missing"},
  };
  return list;
}

IncompleteTable builtin_dataset(std::string_view name) {
  if (name == "smoking-birthweight") return smoking_birthweight();
  if (name == "bone-density") return bone_density();
  if (name == "spo-full") return spo_full();
  if (name == "spo-y1") return spo_y1();
  if (name == "spo-y1y2") return spo_y1y2();
  throw DataError("unknown dataset '" + std::string(name) + "'");
}

}  // namespace misstab
