#pragma once

#include <string>
#include <vector>

#include "spio/types.hpp"

namespace spio::testing {

struct Snippet {
  StageId stage;
  std::string code;
  std::string identifier;  // expected flagged identifier; empty for compliant code
  int line = 1;
};

const std::vector<Snippet>& violating_snippets();
const std::vector<Snippet>& compliant_snippets();

}  // namespace spio::testing
