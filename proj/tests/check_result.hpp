#pragma once

#include <string>

namespace ppp::test {

struct CheckResult
{
  std::string name;
  bool pass = false;
  std::string detail;
};

} // namespace ppp::test
