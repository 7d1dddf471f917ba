#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <omp.h>

#include "fixtures.hpp"
#include "mcpflow/error.hpp"
#include "mcpflow/evaluation.hpp"

using namespace mcpflow;
using doctest::Approx;

namespace {

const FeatureLayout kLayout{1, 2};
const KernelConfig kKernel{KernelVariant::MCP, 1.0};

EventSequence patient(int unit, double time, double window_end, std::vector<int> bits = {0}) {
    EventSequence seq;
    seq.subject_id = "p";
    seq.static_features = {0};
    seq.events.push_back(Event{time, unit, kNullDuration, std::move(bits)});
    seq.window_end = window_end;
    return seq;
}

// Every row of the table puts all mass on `to`.
TransitionTable forced(int size, int to) {
    TransitionTable t;
    t.size = size;
    std::vector<double> row(static_cast<std::size_t>(size), 0.0);
    row[static_cast<std::size_t>(to - 1)] = 1.0;
    t.transition.assign(static_cast<std::size_t>(size), row);
    t.initial = row;
    return t;
}

OccupancyMatrix occupancy(std::initializer_list<std::initializer_list<double>> rows) {
    OccupancyMatrix m;
    m.counts = Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()),
                               static_cast<Eigen::Index>(rows.begin()->size()));
    int r = 0;
    for (const auto& row : rows) {
        int c = 0;
        for (double v : row) m.counts(r, c++) = v;
        ++r;
    }
    return m;
}

}  // namespace

TEST_CASE("argmax ties go to the smallest label") {
    CHECK(argmax_label(Eigen::Vector3d(0.2, 0.4, 0.4)) == 2);
    CHECK(argmax_label(Eigen::Vector3d(1.0 / 3, 1.0 / 3, 1.0 / 3)) == 1);
}

TEST_CASE("predict_next") {
    const auto seq = patient(1, 1.0, 5.0);
    const PointProcessModel zero(ParameterMatrix(kLayout.total(), {3, 4}), kKernel, kLayout);
    CHECK(predict_next(zero, seq, 1, 2.0) == FlowPrediction{1, 1});

    Matrix theta = Matrix::Zero(3, 4);
    // The history block sees feature 0 with weight h(1, 1) = 1 at t = 1.
    theta(1, 0) = std::log(2.0);
    theta(1, 3) = 2.0;
    const PointProcessModel model(ParameterMatrix(theta, {2, 2}), kKernel, kLayout);
    CHECK(model.state_distribution(seq, 1, 1.0)(0) == Approx(2.0 / 3.0));
    CHECK(predict_next(model, seq, 1, 1.0) == FlowPrediction{1, 2});

    CHECK_THROWS_AS(PointProcessModel(ParameterMatrix(Matrix::Zero(2, 4), {2, 2}), kKernel, kLayout),
                    InvalidArgument);
    auto wide = seq;
    wide.events[0].features = {5};
    CHECK_THROWS_AS(predict_next(model, wide, 1, 1.0), InvalidArgument);
}

TEST_CASE("shifting every state head leaves the state prediction") {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        Matrix theta = testing::random_matrix(rng, 3, 7, 2.0);
        const PointProcessModel a(ParameterMatrix(theta, {4, 3}), kKernel, kLayout);
        const Eigen::VectorXd u = testing::random_matrix(rng, 3, 1, 5.0);
        theta.leftCols(4).colwise() += u;
        const PointProcessModel b(ParameterMatrix(theta, {4, 3}), kKernel, kLayout);
        auto seq = patient(2, 1.0, 9.0, {0, 1});
        seq.events.push_back(Event{2.5, 3, 2, {1}});
        const double t = rng.uniform(2.5, 6.0);
        CHECK(predict_next(a, seq, 2, t).state == predict_next(b, seq, 2, t).state);
    }
}

TEST_CASE("accuracy report") {
    const std::vector<int> truths{1, 1, 2}, preds{1, 2, 2};
    const auto r = accuracy_report(preds, truths, 3);
    CHECK(*r.per_class[0] == 0.5);
    CHECK(*r.per_class[1] == 1.0);
    CHECK(!r.per_class[2].has_value());
    CHECK(r.overall == Approx(2.0 / 3.0));

    const auto all = accuracy_report(truths, truths, 2);
    CHECK(all.overall == 1.0);
    CHECK(*all.per_class[0] == 1.0);

    CHECK_THROWS_AS(accuracy_report(preds, std::vector<int>{1, 2}, 3), InvalidArgument);

    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> t, p;
        std::size_t correct = 0;
        for (int i = 0; i < 40; ++i) {
            t.push_back(1 + static_cast<int>(rng.below(5)));
            p.push_back(1 + static_cast<int>(rng.below(5)));
            correct += t.back() == p.back();
        }
        const auto rep = accuracy_report(p, t, 5);
        double weighted = 0.0;
        for (int k = 0; k < 5; ++k)
            if (rep.per_class[static_cast<std::size_t>(k)])
                weighted += static_cast<double>(rep.totals[static_cast<std::size_t>(k)]) / 40.0 *
                            *rep.per_class[static_cast<std::size_t>(k)];
        CHECK(rep.overall == Approx(static_cast<double>(correct) / 40.0).epsilon(1e-15));
        CHECK(rep.overall == Approx(weighted).epsilon(1e-12));
    }
}

TEST_CASE("evaluate_sequences covers every later event") {
    std::vector<EventSequence> seqs{testing::toy_sequence({1, 2, 3, 4}, 2, 2, 2),
                                    testing::toy_sequence({1, 3}, 2, 2, 2)};
    const PointProcessModel zero(ParameterMatrix(kLayout.total(), {2, 2}), kKernel, kLayout);
    const auto ev = evaluate_sequences(zero, seqs);
    CHECK(ev.true_states.size() == 4);
    CHECK(ev.true_states == std::vector<int>{2, 1, 2, 2});
    CHECK(ev.predicted_states == std::vector<int>{1, 1, 1, 1});
}

TEST_CASE("forced trajectory") {
    const MarkovModel forced_model(forced(3, 2), forced(4, 1));
    const std::vector<EventSequence> cohort{patient(2, 4.0, 4.0)};
    const auto occ = simulate_cohort(forced_model, forced_model, cohort, {3, 1, 0});
    CHECK(occ.counts.row(1) == Eigen::RowVector3d(1, 1, 1));
    CHECK(occ.counts.row(0).isZero());
    CHECK(occ.counts.row(2).isZero());

    const auto two = simulate_cohort(forced_model, forced_model, cohort, {3, 2, 0});
    CHECK(two.counts == occ.counts);
}

TEST_CASE("long stays hold the unit") {
    // Duration bucket 4 holds for 4 days, then the patient moves to unit 3.
    const MarkovModel m(forced(3, 3), forced(4, 4));
    const std::vector<EventSequence> cohort{patient(1, 4.0, 4.0)};
    const auto occ = simulate_cohort(m, m, cohort, {6, 1, 0});
    CHECK(occ.counts.row(0) == (Eigen::RowVectorXd(6) << 1, 1, 1, 0, 0, 0).finished());
    CHECK(occ.counts.row(2) == (Eigen::RowVectorXd(6) << 0, 0, 0, 1, 1, 1).finished());
}

TEST_CASE("uniform model spreads a large cohort evenly") {
    const int units = 4;
    const PointProcessModel uniform(ParameterMatrix(kLayout.total(), {units, 4}), kKernel, kLayout);
    std::vector<EventSequence> cohort;
    for (int u = 0; u < 10000; ++u) cohort.push_back(patient(1 + u % units, 2.0, 2.0));
    const auto occ = simulate_cohort(uniform, uniform, cohort, {7, 1, 42});
    const double n = 10000.0, p = 1.0 / units;
    for (int c = 0; c < units; ++c)
        CHECK(std::abs(occ.counts(c, 0) - n * p) <= 3.0 * std::sqrt(n * p * (1 - p)));
    for (int d = 0; d < 7; ++d) CHECK(occ.total(d) == n);
}

TEST_CASE("simulation is reproducible across thread counts") {
    Rng rng(12);
    const Matrix theta = testing::random_matrix(rng, 3, 7, 1.0);
    const PointProcessModel model(ParameterMatrix(theta, {4, 3}), kKernel, kLayout);
    std::vector<EventSequence> cohort;
    for (int u = 0; u < 300; ++u) cohort.push_back(patient(1 + u % 4, 1.0 + u % 3, 5.0, {u % 2}));
    omp_set_num_threads(1);
    const auto a = simulate_cohort(model, model, cohort, {7, 3, 9});
    omp_set_num_threads(4);
    const auto b = simulate_cohort(model, model, cohort, {7, 3, 9});
    omp_set_num_threads(omp_get_num_procs());
    CHECK(a.counts == b.counts);
    const auto c = simulate_cohort(model, model, cohort, {7, 3, 10});
    CHECK(a.counts != c.counts);
}

TEST_CASE("simulation errors") {
    const MarkovModel m(forced(3, 2), forced(4, 1));
    CHECK_THROWS_AS(simulate_cohort(m, m, std::vector<EventSequence>{}, {}), InvalidArgument);
    const std::vector<EventSequence> cohort{patient(2, 4.0, 4.0)};
    CHECK_THROWS_AS(simulate_cohort(m, m, cohort, {0, 1, 0}), InvalidArgument);
    CHECK_THROWS_AS(simulate_cohort(m, m, cohort, {3, 0, 0}), InvalidArgument);
}

TEST_CASE("observed occupancy") {
    auto seq = patient(1, 1.0, 5.0);
    seq.events.push_back(Event{3.0, 2, 2, {}});
    const std::vector<EventSequence> seqs{seq};
    const auto occ = observed_occupancy(seqs, 0.0, 7, 2);
    // Days 1..5 are inside the window; day 6 and 7 are not observed.
    CHECK(occ.counts.row(0) == (Eigen::RowVectorXd(7) << 1, 1, 0, 0, 0, 0, 0).finished());
    CHECK(occ.counts.row(1) == (Eigen::RowVectorXd(7) << 0, 0, 1, 1, 1, 0, 0).finished());
}

TEST_CASE("relative simulation error") {
    const auto real = occupancy({{4, 5, 6}, {1, 2, 3}});
    auto e = relative_sim_error(real, real);
    CHECK(*e.overall == 0.0);
    CHECK(*e.per_unit[0] == 0.0);

    const auto zero = occupancy({{0, 0, 0}, {0, 0, 0}});
    e = relative_sim_error(real, zero);
    CHECK(*e.overall == 1.0);
    CHECK(*e.per_unit[1] == 1.0);

    e = relative_sim_error(occupancy({{10}}), occupancy({{12}}));
    CHECK(*e.overall == Approx(0.2));
    CHECK(*e.per_unit[0] == Approx(0.2));

    e = relative_sim_error(occupancy({{0, 2}, {3, 0}}), occupancy({{5, 1}, {3, 1}}));
    CHECK(e.skipped_cells == 2);
    CHECK(*e.per_unit[0] == Approx(0.5));
    CHECK(*e.per_unit[1] == 0.0);

    CHECK_THROWS_AS(relative_sim_error(real, occupancy({{1, 2}})), InvalidArgument);

    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        OccupancyMatrix a{Eigen::MatrixXd(2, 4)}, b{Eigen::MatrixXd(2, 4)};
        for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 4; ++d) {
                a.counts(c, d) = 1.0 + static_cast<double>(rng.below(9));
                b.counts(c, d) = static_cast<double>(rng.below(9));
            }
        const auto r = relative_sim_error(a, b);
        CHECK(*r.overall >= 0.0);
        CHECK((*r.per_unit[0] == 0.0) == (a.counts.row(0) == b.counts.row(0)));
    }
}
