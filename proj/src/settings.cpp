#include "skillforge/settings.hpp"

namespace skillforge {

namespace {
NumericSettings g_settings;
}

const NumericSettings& numeric_settings() noexcept { return g_settings; }

void set_numeric_settings(const NumericSettings& settings) noexcept { g_settings = settings; }

}  // namespace skillforge
