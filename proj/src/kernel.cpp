#include "mcpflow/kernel.hpp"

#include <cmath>

#include "mcpflow/error.hpp"

namespace mcpflow {

void KernelConfig::validate() const {
    if (!std::isfinite(sigma) || sigma < 0.0)
        throw InvalidArgument("kernel sigma must be a non-negative finite number");
    if (variant == KernelVariant::MCP && sigma <= 0.0)
        throw InvalidArgument("MCP kernel requires sigma > 0");
}

std::string_view to_string(KernelVariant variant) {
    switch (variant) {
        case KernelVariant::MCP: return "mcp";
        case KernelVariant::SCP: return "scp";
        case KernelVariant::MPP: return "mpp";
        case KernelVariant::LR: return "lr";
    }
    return "?";
}

KernelVariant parse_kernel_variant(std::string_view name) {
    if (name == "mcp") return KernelVariant::MCP;
    if (name == "scp") return KernelVariant::SCP;
    if (name == "mpp") return KernelVariant::MPP;
    if (name == "lr") return KernelVariant::LR;
    throw InvalidArgument("unknown kernel variant '" + std::string(name) + "'");
}

double kernel_weight(double t, double t_prev, const KernelConfig& config) {
    config.validate();
    if (t < t_prev) throw InvalidArgument("kernel_weight: t precedes t_prev");
    if (config.variant != KernelVariant::MCP) return 1.0;
    const double lag = (t - t_prev) / config.sigma;
    return std::exp(-lag * lag);
}

double time_scale(double t, double t_last, const KernelConfig& config) {
    if (t < t_last) throw InvalidArgument("time_scale: t precedes the last event");
    switch (config.variant) {
        case KernelVariant::MCP: return t - t_last;
        case KernelVariant::SCP: return t;
        case KernelVariant::MPP:
        case KernelVariant::LR: return 1.0;
    }
    return 1.0;
}

}  // namespace mcpflow
