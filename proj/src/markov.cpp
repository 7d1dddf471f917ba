#include "mcpflow/markov.hpp"

#include <string>

#include "mcpflow/error.hpp"

namespace mcpflow {

TransitionTable mc_fit(std::span<const EventSequence> sequences, int catalog_size, LabelHead head) {
    if (sequences.empty()) throw InvalidArgument("mc_fit: no sequences");
    if (catalog_size < 1) throw InvalidArgument("mc_fit: empty label catalog");
    const auto K = static_cast<std::size_t>(catalog_size);

    std::vector<std::vector<double>> counts(K, std::vector<double>(K, 0.0));
    std::vector<double> first(K, 0.0);
    std::size_t transitions = 0;

    auto check = [&](int label) {
        if (label < 1 || label > catalog_size)
            throw InvalidArgument("mc_fit: label " + std::to_string(label) + " outside catalog");
        return static_cast<std::size_t>(label - 1);
    };

    for (const auto& seq : sequences) {
        int prev = 0;
        for (const auto& e : seq.events) {
            const int label = head == LabelHead::State ? e.state : e.duration;
            if (label == kNullDuration) continue;
            const std::size_t cur = check(label);
            if (prev == 0) {
                first[cur] += 1.0;
            } else {
                counts[static_cast<std::size_t>(prev - 1)][cur] += 1.0;
                ++transitions;
            }
            prev = label;
        }
    }
    if (transitions == 0) throw InvalidArgument("mc_fit: no transitions observed");

    TransitionTable table;
    table.size = catalog_size;
    table.transition.assign(K, std::vector<double>(K, 0.0));
    for (std::size_t i = 0; i < K; ++i) {
        double total = 0.0;
        for (double c : counts[i]) total += c;
        for (std::size_t j = 0; j < K; ++j)
            table.transition[i][j] = total > 0.0 ? counts[i][j] / total : 1.0 / static_cast<double>(K);
    }
    double first_total = 0.0;
    for (double c : first) first_total += c;
    table.initial.resize(K);
    for (std::size_t j = 0; j < K; ++j)
        table.initial[j] = first_total > 0.0 ? first[j] / first_total : 1.0 / static_cast<double>(K);
    return table;
}

int mc_predict(const TransitionTable& table, int current_label) {
    if (current_label < 1 || current_label > table.size)
        throw InvalidArgument("mc_predict: unknown label " + std::to_string(current_label));
    const auto& row = table.transition[static_cast<std::size_t>(current_label - 1)];
    std::size_t best = 0;
    for (std::size_t j = 1; j < row.size(); ++j)
        if (row[j] > row[best]) best = j;
    return static_cast<int>(best) + 1;
}

}  // namespace mcpflow
