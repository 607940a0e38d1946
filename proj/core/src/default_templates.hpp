#pragma once

#include <string_view>

#include "scribe/prompt.hpp"

namespace scribe::detail {

std::string_view default_template_source(TemplateName name);

}  // namespace scribe::detail
