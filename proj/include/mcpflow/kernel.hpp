#pragma once

#include <string>
#include <string_view>

namespace mcpflow {

// Intensity family. Each variant fixes the time scaling g(t) of the static
// block and the decay h(t, t') of historical event features:
//   MCP  g = t - t_I   h = exp(-(t - t')^2 / sigma^2)
//   SCP  g = t         h = 1
//   MPP  g = 1         h = 1
//   LR   g = 1         h = 1 for the most recent event, 0 otherwise
enum class KernelVariant { MCP, SCP, MPP, LR };

struct KernelConfig {
    KernelVariant variant = KernelVariant::MCP;
    double sigma = 1.0;  // days; used only by MCP

    void validate() const;
    bool operator==(const KernelConfig&) const = default;
};

std::string_view to_string(KernelVariant variant);
KernelVariant parse_kernel_variant(std::string_view name);

// h(t, t_prev). For LR the caller decides which event is most recent; this
// returns the weight of that event (1).
double kernel_weight(double t, double t_prev, const KernelConfig& config);

// g(t), with t_last the most recent event strictly before t (0 if none).
double time_scale(double t, double t_last, const KernelConfig& config);

}  // namespace mcpflow
