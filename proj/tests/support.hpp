#ifndef STACKLIN_TESTS_SUPPORT_HPP
#define STACKLIN_TESTS_SUPPORT_HPP

#include <string>

#include "stacklin/history.hpp"

namespace testing {

inline stacklin::History parse(const std::string& text) {
  return stacklin::parse_history("stacklin-history v1\n" + text).history;
}

inline stacklin::History fixture(const std::string& name) {
  return stacklin::read_history_file(std::string(STACKLIN_TEST_DATA) + "/" + name).history;
}

inline std::vector<stacklin::OpId> ids(std::initializer_list<stacklin::OpId> l) { return l; }

}  // namespace testing

#endif  // STACKLIN_TESTS_SUPPORT_HPP
