#pragma once

#include <string>
#include <string_view>

namespace qsvm {

// Classic Porter suffix-stripping stemmer. Expects a lowercase ASCII word;
// words of length <= 2 are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace qsvm
