#include "epiwarn/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "epiwarn/errors.hpp"

namespace epiwarn {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            return fields;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

double parse_double(const std::string& s, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw ParseError("bad number '" + s + "'", line);
    return v;
}

int parse_int(const std::string& s, std::size_t line) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw ParseError("bad integer '" + s + "'", line);
    return v;
}

std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view l = text.substr(start, end - start);
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
        lines.emplace_back(l);
        start = end + 1;
    }
    return lines;
}

}  // namespace

std::string trajectories_csv(const std::vector<Trajectory>& trajectories, std::string_view prefix) {
    std::string out = "replicate_id,t,I\n";
    for (std::size_t r = 0; r < trajectories.size(); ++r) {
        const std::string id = std::string(prefix) + "-" + std::to_string(r);
        for (std::size_t t = 0; t < trajectories[r].incidence.size(); ++t) {
            out += id;
            out += ',';
            out += std::to_string(t + 1);
            out += ',';
            out += format_double(trajectories[r].incidence[t]);
            out += '\n';
        }
    }
    return out;
}

json sir_params_to_json(const SirParams& p) {
    return json{{"lambda", p.lambda}, {"mu", p.mu},         {"alpha", p.alpha},
                {"beta0", p.beta0},   {"beta1", p.beta1},   {"sigma1", p.sigma1},
                {"sigma2", p.sigma2}, {"noise_kind", to_string(p.noise_kind)},
                {"s0", p.s0},         {"i0", p.i0}};
}

json trajectories_manifest(const std::vector<Trajectory>& trajectories, std::string_view prefix, NoiseKind kind,
                           std::uint64_t seed) {
    json reps = json::array();
    for (std::size_t r = 0; r < trajectories.size(); ++r) {
        const auto& t = trajectories[r];
        reps.push_back({{"replicate_id", std::string(prefix) + "-" + std::to_string(r)},
                        {"params", sir_params_to_json(t.params)},
                        {"seed", t.seed},
                        {"transition_time", t.transition_time ? json(*t.transition_time) : json(nullptr)}});
    }
    return json{{"schema", "epiwarn.trajectories"},
                {"version", kReportSchemaVersion},
                {"noise_kind", to_string(kind)},
                {"seed", seed},
                {"replicates", reps}};
}

std::string windows_csv(const WindowSet& windows) {
    int max_len = 0;
    for (const auto& w : windows) max_len = std::max(max_len, w.length());
    std::string out = "window_id,label,gap,length";
    for (int i = 1; i <= max_len; ++i) out += ",v" + std::to_string(i);
    out += '\n';
    for (const auto& w : windows) {
        out += w.source_id;
        out += ',';
        out += label_char(w.label);
        out += ',' + std::to_string(w.gap) + ',' + std::to_string(w.length());
        for (int i = 0; i < max_len; ++i) {
            out += ',';
            if (i < w.length()) out += format_double(w.values[static_cast<std::size_t>(i)]);
        }
        out += '\n';
    }
    return out;
}

WindowSet parse_windows_csv(std::string_view text) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw ParseError("empty window file", 1);
    const auto header = split_csv_line(lines[0]);
    if (header.size() < 4 || header[0] != "window_id" || header[1] != "label" || header[2] != "gap" ||
        header[3] != "length")
        throw ParseError("unexpected window header", 1);
    WindowSet out;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (lines[ln].empty()) continue;
        const auto f = split_csv_line(lines[ln]);
        if (f.size() != header.size()) throw ParseError("wrong field count", ln + 1);
        LabeledWindow w;
        w.source_id = f[0];
        try {
            w.label = parse_label(f[1]);
        } catch (const ValidationError&) {
            throw ParseError("bad label '" + f[1] + "'", ln + 1);
        }
        w.gap = parse_int(f[2], ln + 1);
        const int len = parse_int(f[3], ln + 1);
        if (len < 0 || static_cast<std::size_t>(len) + 4 > f.size()) throw ParseError("bad length", ln + 1);
        for (int i = 0; i < len; ++i) w.values.push_back(parse_double(f[4 + static_cast<std::size_t>(i)], ln + 1));
        out.push_back(std::move(w));
    }
    return out;
}

json windows_manifest(const WindowSet& windows) {
    std::size_t n_t = 0;
    for (const auto& w : windows) n_t += w.label == Label::T ? 1 : 0;
    return json{{"schema", "epiwarn.windows"},
                {"version", kReportSchemaVersion},
                {"count", windows.size()},
                {"n_T", n_t},
                {"n_N", windows.size() - n_t}};
}

std::string features_csv(const FeatureMatrix& matrix) {
    std::string out = "window_id,label";
    for (const auto& n : matrix.names) out += "," + n;
    out += '\n';
    for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
        out += matrix.ids.size() > i ? matrix.ids[i] : std::to_string(i);
        out += ',';
        out += label_char(matrix.labels[i]);
        for (double v : matrix.rows[i]) out += "," + format_double(v);
        out += '\n';
    }
    return out;
}

FeatureMatrix parse_features_csv(std::string_view text) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw ParseError("empty feature file", 1);
    const auto header = split_csv_line(lines[0]);
    if (header.size() < 3 || header[0] != "window_id" || header[1] != "label")
        throw ParseError("unexpected feature header", 1);
    FeatureMatrix m;
    m.names.assign(header.begin() + 2, header.end());
    if (m.names == feature_names(FeatureSet::SF22))
        m.set_id = FeatureSet::SF22;
    else if (m.names == feature_names(FeatureSet::EWSI5))
        m.set_id = FeatureSet::EWSI5;
    else
        throw ParseError("feature columns match neither SF22 nor EWSI5", 1);
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (lines[ln].empty()) continue;
        const auto f = split_csv_line(lines[ln]);
        if (f.size() != header.size()) throw ParseError("wrong field count", ln + 1);
        m.ids.push_back(f[0]);
        try {
            m.labels.push_back(parse_label(f[1]));
        } catch (const ValidationError&) {
            throw ParseError("bad label '" + f[1] + "'", ln + 1);
        }
        std::vector<double> row;
        for (std::size_t j = 2; j < f.size(); ++j) row.push_back(parse_double(f[j], ln + 1));
        m.rows.push_back(std::move(row));
    }
    return m;
}

namespace {

json tree_to_json(const RegressionTree& t) {
    json f = json::array(), th = json::array(), l = json::array(), r = json::array(), v = json::array();
    for (const auto& n : t.nodes) {
        f.push_back(n.feature);
        th.push_back(n.threshold);
        l.push_back(n.left);
        r.push_back(n.right);
        v.push_back(n.value);
    }
    return json{{"feature", f}, {"threshold", th}, {"left", l}, {"right", r}, {"value", v}};
}

RegressionTree tree_from_json(const json& j) {
    RegressionTree t;
    const auto& f = j.at("feature");
    for (std::size_t i = 0; i < f.size(); ++i) {
        TreeNode n;
        n.feature = f[i].get<int>();
        n.threshold = j.at("threshold")[i].get<double>();
        n.left = j.at("left")[i].get<int>();
        n.right = j.at("right")[i].get<int>();
        n.value = j.at("value")[i].get<double>();
        t.nodes.push_back(n);
    }
    return t;
}

json config_to_json(const TrainConfig& c) {
    return json{{"seed", c.seed},
                {"lrm", {{"ridge", c.lrm.ridge}, {"tolerance", c.lrm.tolerance}, {"max_iterations", c.lrm.max_iterations}}},
                {"knn", {{"k", c.knn.k}, {"grid", c.knn.grid}, {"folds", c.knn.folds}}},
                {"svm", {{"c", c.svm.c}, {"gamma", c.svm.gamma}, {"tolerance", c.svm.tolerance}}},
                {"gbm",
                 {{"rounds", c.gbm.rounds},
                  {"learning_rate", c.gbm.learning_rate},
                  {"max_depth", c.gbm.max_depth},
                  {"min_samples_leaf", c.gbm.min_samples_leaf}}}};
}

TrainConfig config_from_json(const json& j) {
    TrainConfig c;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.lrm.ridge = j.at("lrm").at("ridge");
    c.lrm.tolerance = j.at("lrm").at("tolerance");
    c.lrm.max_iterations = j.at("lrm").at("max_iterations");
    c.knn.k = j.at("knn").at("k");
    c.knn.grid = j.at("knn").at("grid").get<std::vector<int>>();
    c.knn.folds = j.at("knn").at("folds");
    c.svm.c = j.at("svm").at("c");
    c.svm.gamma = j.at("svm").at("gamma");
    c.svm.tolerance = j.at("svm").at("tolerance");
    c.gbm.rounds = j.at("gbm").at("rounds");
    c.gbm.learning_rate = j.at("gbm").at("learning_rate");
    c.gbm.max_depth = j.at("gbm").at("max_depth");
    c.gbm.min_samples_leaf = j.at("gbm").at("min_samples_leaf");
    return c;
}

std::vector<int> labels_to_ints(const std::vector<Label>& y) {
    std::vector<int> out;
    for (Label l : y) out.push_back(l == Label::T ? 1 : 0);
    return out;
}

}  // namespace

json model_to_json(const TrainedModel& model) {
    const auto& st = model.standardization;
    json doc{{"schema", "epiwarn.model"},
             {"version", kModelSchemaVersion},
             {"kind", to_string(model.kind)},
             {"feature_set", to_string(model.feature_set)},
             {"feature_names", model.feature_names},
             {"standardization",
              {{"input_dim", st.input_dim},
               {"kept", st.kept},
               {"mean", st.mean},
               {"sd", st.sd},
               {"dropped", st.dropped},
               {"scale", st.scale}}},
             {"config", config_to_json(model.config)},
             {"warnings", model.warnings}};
    json params;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, LrmParams>) {
                params = {{"weights", p.weights}, {"intercept", p.intercept}, {"iterations", p.iterations}};
                params["constant_probability"] = p.constant_probability ? json(*p.constant_probability) : json(nullptr);
            } else if constexpr (std::is_same_v<P, KnnParams>) {
                params = {{"x", p.x}, {"y", labels_to_ints(p.y)}, {"k", p.k}, {"cv_accuracy", p.cv_accuracy}};
            } else if constexpr (std::is_same_v<P, SvmParams>) {
                params = {{"support_vectors", p.support_vectors},
                          {"coef", p.coef},
                          {"rho", p.rho},
                          {"gamma", p.gamma},
                          {"c", p.c},
                          {"iterations", p.iterations},
                          {"kkt_gap", p.kkt_gap}};
            } else {
                json trees = json::array();
                for (const auto& t : p.trees) trees.push_back(tree_to_json(t));
                params = {{"init", p.init},
                          {"learning_rate", p.learning_rate},
                          {"trees", trees},
                          {"loss_history", p.loss_history}};
            }
        },
        model.params);
    doc["params"] = params;
    return doc;
}

TrainedModel model_from_json(const json& doc) {
    if (doc.value("schema", "") != "epiwarn.model") throw ValidationError("not a model document");
    if (doc.value("version", -1) != kModelSchemaVersion)
        throw ValidationError("model schema version " + std::to_string(doc.value("version", -1)) +
                              " is not supported (expected " + std::to_string(kModelSchemaVersion) + ")");
    TrainedModel m;
    m.kind = parse_model_kind(doc.at("kind").get<std::string>());
    m.feature_set = parse_feature_set(doc.at("feature_set").get<std::string>());
    m.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    const auto& st = doc.at("standardization");
    m.standardization.input_dim = st.at("input_dim");
    m.standardization.kept = st.at("kept").get<std::vector<std::size_t>>();
    m.standardization.mean = st.at("mean").get<std::vector<double>>();
    m.standardization.sd = st.at("sd").get<std::vector<double>>();
    m.standardization.dropped = st.at("dropped").get<std::vector<std::size_t>>();
    m.standardization.scale = st.at("scale");
    m.config = config_from_json(doc.at("config"));
    m.warnings = doc.at("warnings").get<std::vector<std::string>>();
    const auto& p = doc.at("params");
    switch (m.kind) {
        case ModelKind::LRM: {
            LrmParams lp;
            lp.weights = p.at("weights").get<std::vector<double>>();
            lp.intercept = p.at("intercept");
            lp.iterations = p.at("iterations");
            if (!p.at("constant_probability").is_null()) lp.constant_probability = p.at("constant_probability").get<double>();
            m.params = lp;
            break;
        }
        case ModelKind::KNN: {
            KnnParams kp;
            kp.x = p.at("x").get<Rows>();
            for (int v : p.at("y").get<std::vector<int>>()) kp.y.push_back(v ? Label::T : Label::N);
            kp.k = p.at("k");
            kp.cv_accuracy = p.at("cv_accuracy").get<std::vector<double>>();
            m.params = kp;
            break;
        }
        case ModelKind::SVM: {
            SvmParams sp;
            sp.support_vectors = p.at("support_vectors").get<Rows>();
            sp.coef = p.at("coef").get<std::vector<double>>();
            sp.rho = p.at("rho");
            sp.gamma = p.at("gamma");
            sp.c = p.at("c");
            sp.iterations = p.at("iterations");
            sp.kkt_gap = p.at("kkt_gap");
            m.params = sp;
            break;
        }
        case ModelKind::GBM: {
            GbmParams gp;
            gp.init = p.at("init");
            gp.learning_rate = p.at("learning_rate");
            for (const auto& t : p.at("trees")) gp.trees.push_back(tree_from_json(t));
            gp.loss_history = p.at("loss_history").get<std::vector<double>>();
            m.params = gp;
            break;
        }
    }
    return m;
}

}  // namespace epiwarn
