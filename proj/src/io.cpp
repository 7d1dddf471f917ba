#include "mcpflow/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mcpflow/error.hpp"

namespace mcpflow {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing", path);
    out << text;
    if (!out) throw IoError("write failed", path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string default_catalog_path(const std::string& dataset_path) {
    const auto slash = dataset_path.find_last_of('/');
    const auto dot = dataset_path.find_last_of('.');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (has_ext ? dataset_path.substr(0, dot) : dataset_path) + ".catalog.json";
}

// ---- catalog ---------------------------------------------------------------

json catalog_to_json(const Catalog& c) {
    return json{{"profile", c.profile},       {"treatment", c.treatment},
                {"medication", c.medication}, {"nursing", c.nursing},
                {"states", c.states},         {"durations", c.durations}};
}

Catalog catalog_from_json(const json& j) {
    Catalog c;
    auto list = [&](const char* key, std::vector<std::string>& dst) {
        if (j.contains(key)) dst = j.at(key).get<std::vector<std::string>>();
    };
    list("profile", c.profile);
    list("treatment", c.treatment);
    list("medication", c.medication);
    list("nursing", c.nursing);
    list("states", c.states);
    list("durations", c.durations);
    if (c.states.empty() || c.durations.empty())
        throw ValidationError("catalog must list at least one state and one duration class");
    c.build_index();
    return c;
}

Catalog read_catalog(const std::string& path) {
    try {
        return catalog_from_json(json::parse(read_text(path)));
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed catalog (") + e.what() + ")", path);
    }
}

void write_catalog(const std::string& path, const Catalog& catalog) {
    write_text(path, catalog_to_json(catalog).dump(2) + "\n");
}

// ---- dataset ---------------------------------------------------------------

namespace {

std::vector<int> parse_features(const json& arr, const Catalog& catalog, bool profile) {
    std::vector<int> out;
    for (const auto& item : arr) {
        if (item.is_number_integer()) {
            out.push_back(item.get<int>());
        } else if (item.is_string()) {
            const auto idx = profile ? catalog.profile_index(item.get<std::string>())
                                     : catalog.dynamic_index(item.get<std::string>());
            if (idx) out.push_back(*idx);
        } else {
            throw ValidationError("feature entries must be integers or codes");
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int parse_label(const json& v, const std::vector<std::string>& names, const char* what) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_string()) {
        const auto name = v.get<std::string>();
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i) + 1;
        throw ValidationError(std::string("unknown ") + what + " label '" + name + "'");
    }
    throw ValidationError(std::string(what) + " label must be an integer or a name");
}

EventSequence parse_sequence(const json& j, const Catalog& catalog) {
    EventSequence seq;
    const auto& id = j.at("subject_id");
    seq.subject_id = id.is_string() ? id.get<std::string>() : id.dump();
    seq.window_end = j.at("window_end").get<double>();
    if (j.contains("static")) seq.static_features = parse_features(j.at("static"), catalog, true);
    seq.synthetic = j.value("provenance", std::string("observed")) == "synthetic";
    for (const auto& ej : j.at("events")) {
        Event e;
        e.time = ej.at("time").get<double>();
        e.state = parse_label(ej.at("state"), catalog.states, "state");
        const auto& d = ej.contains("duration") ? ej.at("duration") : json();
        e.duration = d.is_null() ? kNullDuration : parse_label(d, catalog.durations, "duration");
        if (ej.contains("features")) e.features = parse_features(ej.at("features"), catalog, false);
        seq.events.push_back(std::move(e));
    }
    validate(seq, catalog.layout(), catalog.labels());
    return seq;
}

ordered_json sequence_to_json(const EventSequence& seq) {
    ordered_json j;
    j["subject_id"] = seq.subject_id;
    j["window_end"] = seq.window_end;
    j["static"] = seq.static_features;
    ordered_json events = ordered_json::array();
    for (const auto& e : seq.events) {
        ordered_json ej;
        ej["time"] = e.time;
        ej["state"] = e.state;
        ej["duration"] = e.duration == kNullDuration ? ordered_json() : ordered_json(e.duration);
        ej["features"] = e.features;
        events.push_back(std::move(ej));
    }
    j["events"] = std::move(events);
    if (seq.synthetic) j["provenance"] = "synthetic";
    return j;
}

}  // namespace

std::vector<EventSequence> read_dataset(const std::string& path, const Catalog& catalog) {
    std::istringstream in(read_text(path));
    std::vector<EventSequence> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path + ":" + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw IoError(std::string("malformed record (") + e.what() + ")", where);
        }
        try {
            out.push_back(parse_sequence(j, catalog));
        } catch (const json::exception& e) {
            throw IoError(std::string("malformed record (") + e.what() + ")", where);
        } catch (const InvalidArgument& e) {
            throw ValidationError(where + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    return out;
}

std::string dataset_to_string(const std::vector<EventSequence>& sequences) {
    std::string text;
    for (const auto& seq : sequences) {
        text += sequence_to_json(seq).dump();
        text.push_back('\n');
    }
    return text;
}

void write_dataset(const std::string& path, const std::vector<EventSequence>& sequences) {
    write_text(path, dataset_to_string(sequences));
}

// ---- model envelope --------------------------------------------------------

namespace {

constexpr const char* kModelFormat = "mcpflow-model";

ordered_json matrix_to_json(const ParameterMatrix& p) {
    ordered_json j;
    j["rows"] = p.rows();
    j["states"] = p.states();
    j["durations"] = p.durations();
    ordered_json groups = ordered_json::array();
    for (Eigen::Index m = 0; m < p.values.rows(); ++m) {
        if (!(p.values.row(m).array() != 0.0).any()) continue;
        std::vector<double> row(p.values.row(m).data(), p.values.row(m).data() + p.values.cols());
        groups.push_back(ordered_json{{"row", m}, {"values", row}});
    }
    j["groups"] = std::move(groups);
    return j;
}

ParameterMatrix matrix_from_json(const json& j) {
    const LabelSpace labels{j.at("states").get<int>(), j.at("durations").get<int>()};
    ParameterMatrix p(j.at("rows").get<int>(), labels);
    for (const auto& g : j.at("groups")) {
        const auto row = g.at("row").get<Eigen::Index>();
        const auto values = g.at("values").get<std::vector<double>>();
        if (row < 0 || row >= p.values.rows() || static_cast<int>(values.size()) != labels.heads())
            throw ValidationError("model file: malformed parameter group");
        for (int k = 0; k < labels.heads(); ++k) p.values(row, k) = values[static_cast<std::size_t>(k)];
    }
    return p;
}

ordered_json kernel_to_json(const KernelConfig& k) {
    return ordered_json{{"variant", std::string(to_string(k.variant))}, {"sigma", k.sigma}};
}

KernelConfig kernel_from_json(const json& j) {
    KernelConfig k{parse_kernel_variant(j.at("variant").get<std::string>()), j.at("sigma").get<double>()};
    k.validate();
    return k;
}

ordered_json layout_to_json(const FeatureLayout& l) {
    return ordered_json{{"profile", l.profile_dim}, {"dynamic", l.dynamic_dim}};
}

FeatureLayout layout_from_json(const json& j) {
    return {j.at("profile").get<int>(), j.at("dynamic").get<int>()};
}

ordered_json table_to_json(const TransitionTable& t) {
    return ordered_json{{"size", t.size}, {"initial", t.initial}, {"transition", t.transition}};
}

TransitionTable table_from_json(const json& j) {
    TransitionTable t;
    t.size = j.at("size").get<int>();
    t.initial = j.at("initial").get<std::vector<double>>();
    t.transition = j.at("transition").get<std::vector<std::vector<double>>>();
    if (t.initial.size() != static_cast<std::size_t>(t.size) ||
        t.transition.size() != static_cast<std::size_t>(t.size))
        throw ValidationError("model file: malformed transition table");
    return t;
}

ordered_json chain_to_json(const HierarchicalChain& c) {
    ordered_json steps = ordered_json::array();
    for (const auto& s : c.steps)
        steps.push_back(ordered_json{{"majority", s.majority}, {"parameters", matrix_to_json(s.model)}});
    return ordered_json{{"head", c.head == LabelHead::State ? "state" : "duration"},
                        {"steps", std::move(steps)},
                        {"final_class", c.final_class}};
}

HierarchicalChain chain_from_json(const json& j) {
    HierarchicalChain c;
    c.head = j.at("head").get<std::string>() == "state" ? LabelHead::State : LabelHead::Duration;
    for (const auto& s : j.at("steps"))
        c.steps.push_back({s.at("majority").get<int>(), matrix_from_json(s.at("parameters"))});
    c.final_class = j.at("final_class").get<int>();
    return c;
}

ordered_json report_to_json(const SolverReport& r) {
    return ordered_json{{"returned", r.returned},
                        {"outer_iterations", r.outer_iterations},
                        {"inner_iterations", r.inner_iterations},
                        {"converged", r.converged},
                        {"final_loss", r.final_loss},
                        {"theta_loss", r.theta_loss},
                        {"primal_residual", r.primal_residual},
                        {"theta_norm", r.theta_norm},
                        {"nonzero_rows", r.nonzero_rows}};
}

SolverReport report_from_json(const json& j) {
    SolverReport r;
    r.returned = j.value("returned", std::string("X"));
    r.outer_iterations = j.value("outer_iterations", 0);
    r.inner_iterations = j.value("inner_iterations", 0L);
    r.converged = j.value("converged", false);
    r.final_loss = j.value("final_loss", 0.0);
    r.theta_loss = j.value("theta_loss", 0.0);
    r.primal_residual = j.value("primal_residual", 0.0);
    r.theta_norm = j.value("theta_norm", 0.0);
    r.nonzero_rows = j.value("nonzero_rows", 0);
    return r;
}

}  // namespace

ordered_json model_to_json(const FlowModel& model, const std::string& catalog_hash,
                           const json& extra) {
    ordered_json j;
    j["format"] = kModelFormat;
    j["version"] = kModelFormatVersion;
    j["kind"] = std::string(to_string(model.kind()));
    j["catalog_hash"] = catalog_hash;
    j["labels"] = ordered_json{{"states", model.labels().states}, {"durations", model.labels().durations}};

    if (const auto* pp = dynamic_cast<const PointProcessModel*>(&model)) {
        j["kernel"] = kernel_to_json(pp->kernel());
        j["layout"] = layout_to_json(pp->layout());
        j["parameters"] = matrix_to_json(pp->parameters());
        j["report"] = report_to_json(pp->report);
    } else if (const auto* mc = dynamic_cast<const MarkovModel*>(&model)) {
        j["state_chain"] = table_to_json(mc->state_table());
        j["duration_chain"] = table_to_json(mc->duration_table());
    } else if (const auto* h = dynamic_cast<const HierarchicalModel*>(&model)) {
        j["kernel"] = kernel_to_json(h->kernel());
        j["layout"] = layout_to_json(h->layout());
        j["state_hierarchy"] = chain_to_json(h->state_chain());
        j["duration_hierarchy"] = chain_to_json(h->duration_chain());
    }
    j["extra"] = extra.is_null() ? ordered_json::object() : ordered_json::parse(extra.dump());
    return j;
}

ModelEnvelope model_from_json(const json& j) {
    if (j.value("format", std::string()) != kModelFormat)
        throw ValidationError("not an mcpflow model file");
    if (j.value("version", 0) != kModelFormatVersion)
        throw ValidationError("unsupported model file version " + std::to_string(j.value("version", 0)));

    ModelEnvelope env;
    env.catalog_hash = j.value("catalog_hash", std::string());
    env.extra = j.value("extra", json::object());
    const auto kind = j.at("kind").get<std::string>();
    const LabelSpace labels{j.at("labels").at("states").get<int>(), j.at("labels").at("durations").get<int>()};

    if (kind == to_string(ModelKind::PointProcess)) {
        auto m = std::make_unique<PointProcessModel>(matrix_from_json(j.at("parameters")),
                                                     kernel_from_json(j.at("kernel")),
                                                     layout_from_json(j.at("layout")));
        if (j.contains("report")) m->report = report_from_json(j.at("report"));
        env.model = std::move(m);
    } else if (kind == to_string(ModelKind::Markov)) {
        env.model = std::make_unique<MarkovModel>(table_from_json(j.at("state_chain")),
                                                  table_from_json(j.at("duration_chain")));
    } else if (kind == to_string(ModelKind::Hierarchical)) {
        env.model = std::make_unique<HierarchicalModel>(
            chain_from_json(j.at("state_hierarchy")), chain_from_json(j.at("duration_hierarchy")),
            labels, kernel_from_json(j.at("kernel")), layout_from_json(j.at("layout")));
    } else {
        throw ValidationError("unknown model kind '" + kind + "'");
    }
    return env;
}

void write_model(const std::string& path, const FlowModel& model, const std::string& catalog_hash,
                 const json& extra) {
    write_text(path, model_to_json(model, catalog_hash, extra).dump(2) + "\n");
}

ModelEnvelope read_model(const std::string& path, const std::string& expected_catalog_hash) {
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed model file (") + e.what() + ")", path);
    }
    ModelEnvelope env;
    try {
        env = model_from_json(j);
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed model file (") + e.what() + ")", path);
    }
    if (!expected_catalog_hash.empty() && env.catalog_hash != expected_catalog_hash)
        throw ValidationError("model " + path + " was trained against catalog " + env.catalog_hash +
                              ", dataset catalog is " + expected_catalog_hash);
    return env;
}

json generator_manifest(const GeneratedData& data) {
    const auto& cfg = data.config;
    json j;
    j["seed"] = cfg.seed;
    j["num_subjects"] = cfg.num_subjects;
    j["labels"] = {{"states", cfg.labels.states}, {"durations", cfg.labels.durations}};
    j["layout"] = {{"profile", cfg.layout.profile_dim}, {"dynamic", cfg.layout.dynamic_dim}};
    j["kernel"] = {{"variant", std::string(to_string(cfg.kernel.variant))}, {"sigma", cfg.kernel.sigma}};
    j["window_days"] = cfg.window_days;
    j["first_event_time"] = cfg.first_event_time;
    j["recipe"] = {{"row_density", cfg.recipe.row_density},
                   {"magnitude_lo", cfg.recipe.magnitude_lo},
                   {"magnitude_hi", cfg.recipe.magnitude_hi}};
    j["profile_template"] = cfg.profile_template;
    j["state_templates"] = cfg.state_templates;
    j["imbalance_profile"] = cfg.imbalance_profile;
    j["cue_templates"] = cfg.cue_templates;
    j["planted"] = json::parse(ordered_json(matrix_to_json(data.planted)).dump());
    return j;
}

}  // namespace mcpflow
