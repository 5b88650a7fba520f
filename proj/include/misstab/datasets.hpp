#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "misstab/table.hpp"

namespace misstab {

struct DatasetInfo {
  std::string name;
  std::string description;
};

const std::vector<DatasetInfo>& builtin_datasets();

// Throws DataError for an unknown name.
IncompleteTable builtin_dataset(std::string_view name);

}  // namespace misstab
