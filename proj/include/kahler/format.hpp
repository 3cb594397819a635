#pragma once

#include <string>
#include <vector>

namespace kahler {

/// Round-trippable decimal; "inf", "-inf", "nan" for non-finite values.
std::string fmt_num(double v);

std::string join_csv(const std::vector<std::string>& fields);

}  // namespace kahler
