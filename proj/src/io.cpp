#include "ctst/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ctst/errors.hpp"

namespace ctst {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    out << content;
    if (!out) throw InputError("write failed: " + path);
}

namespace {

json parse_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string(what) + ": " + e.what());
    }
}

const json& field(const json& j, const char* key, const char* what) {
    auto it = j.find(key);
    if (it == j.end())
        throw InputError(std::string(what) + ": missing field \"" + key + "\"");
    return *it;
}

double num_field(const json& j, const char* key, const char* what) {
    const json& f = field(j, key, what);
    if (!f.is_number())
        throw InputError(std::string(what) + ": field \"" + key + "\" must be a number");
    return f.get<double>();
}

int int_field(const json& j, const char* key, const char* what) {
    const json& f = field(j, key, what);
    if (!f.is_number_integer())
        throw InputError(std::string(what) + ": field \"" + key + "\" must be an integer");
    return f.get<int>();
}

void append_double_array(std::string& out, const std::vector<double>& v) {
    out += '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    out += ']';
}

void append_int_array(std::string& out, const std::vector<int>& v) {
    out += '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    out += ']';
}

std::vector<double> double_array(const json& j, const char* what) {
    if (!j.is_array()) throw InputError(std::string(what) + ": expected an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_number()) throw InputError(std::string(what) + ": expected numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<int> int_array(const json& j, const char* what) {
    if (!j.is_array()) throw InputError(std::string(what) + ": expected an array");
    std::vector<int> out;
    out.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_number_integer()) throw InputError(std::string(what) + ": expected integers");
        out.push_back(e.get<int>());
    }
    return out;
}

// Node block as nested arrays: rows are observations.
void append_matrix(std::string& out, const Matrix& m) {
    out += '[';
    for (long i = 0; i < m.rows(); ++i) {
        if (i) out += ',';
        out += '[';
        for (long c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += format_double(m(i, c));
        }
        out += ']';
    }
    out += ']';
}

Matrix matrix_from_json(const json& j, int rows, int cols, const char* what) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw InputError(std::string(what) + ": expected " + std::to_string(rows) + " rows");
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw InputError(std::string(what) + ": row " + std::to_string(i) + " must have " +
                             std::to_string(cols) + " entries");
        for (int c = 0; c < cols; ++c) {
            const json& e = row[static_cast<std::size_t>(c)];
            if (!e.is_number()) throw InputError(std::string(what) + ": expected numbers");
            m(i, c) = e.get<double>();
        }
    }
    return m;
}

} // namespace

std::string graph_to_json(const Graph& g) {
    std::string out = "{\n\"num_nodes\": " + std::to_string(g.num_nodes()) + ",\n\"edges\": [";
    const auto& edges = g.edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        out += (i ? ",\n" : "\n");
        out += '[' + std::to_string(edges[i].u) + ',' + std::to_string(edges[i].v) + ',' +
               format_double(edges[i].w) + ']';
    }
    out += "\n]\n}\n";
    return out;
}

Graph graph_from_json(const std::string& text) {
    const json j = parse_json(text, "graph file");
    const int n = int_field(j, "num_nodes", "graph file");
    const json& je = field(j, "edges", "graph file");
    if (!je.is_array()) throw InputError("graph file: \"edges\" must be an array");
    std::vector<Edge> edges;
    edges.reserve(je.size());
    for (const auto& e : je) {
        if (!e.is_array() || e.size() != 3)
            throw InputError("graph file: each edge must be [u, v, weight]");
        if (!e[0].is_number_integer() || !e[1].is_number_integer() || !e[2].is_number())
            throw InputError("graph file: each edge must be [u, v, weight]");
        edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
    }
    return Graph::build(n, edges);
}

std::string samples_to_json(const NodeSampleSet& s) {
    s.validate();
    std::string out = "{\n\"d\": " + std::to_string(s.dim()) +
                      ",\n\"n\": " + std::to_string(s.n()) +
                      ",\n\"n_prime\": " + std::to_string(s.n_prime()) + ",\n\"X\": [";
    for (int v = 0; v < s.num_nodes(); ++v) {
        out += (v ? ",\n" : "\n");
        append_matrix(out, s.X[static_cast<std::size_t>(v)]);
    }
    out += "\n],\n\"X_prime\": [";
    for (int v = 0; v < s.num_nodes(); ++v) {
        out += (v ? ",\n" : "\n");
        append_matrix(out, s.Xp[static_cast<std::size_t>(v)]);
    }
    out += "\n]\n}\n";
    return out;
}

NodeSampleSet samples_from_json(const std::string& text) {
    const json j = parse_json(text, "samples file");
    const int d = int_field(j, "d", "samples file");
    const int n = int_field(j, "n", "samples file");
    const int np = int_field(j, "n_prime", "samples file");
    const json& jx = field(j, "X", "samples file");
    const json& jxp = field(j, "X_prime", "samples file");
    if (!jx.is_array() || !jxp.is_array() || jx.size() != jxp.size())
        throw InputError("samples file: X and X_prime must be arrays with one entry per node");
    NodeSampleSet s;
    s.X.reserve(jx.size());
    s.Xp.reserve(jx.size());
    for (std::size_t v = 0; v < jx.size(); ++v) {
        s.X.push_back(matrix_from_json(jx[v], n, d, "samples file"));
        s.Xp.push_back(matrix_from_json(jxp[v], np, d, "samples file"));
    }
    s.validate();
    return s;
}

std::string samples_to_csv(const NodeSampleSet& s) {
    s.validate();
    std::string out = "node,set,idx";
    for (int c = 1; c <= s.dim(); ++c) out += ",x" + std::to_string(c);
    out += '\n';
    auto rows = [&](const Matrix& m, int v, const char* set) {
        for (long i = 0; i < m.rows(); ++i) {
            out += std::to_string(v);
            out += ',';
            out += set;
            out += ',' + std::to_string(i);
            for (long c = 0; c < m.cols(); ++c) out += ',' + format_double(m(i, c));
            out += '\n';
        }
    };
    for (int v = 0; v < s.num_nodes(); ++v) {
        rows(s.X[static_cast<std::size_t>(v)], v, "p");
        rows(s.Xp[static_cast<std::size_t>(v)], v, "q");
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

NodeSampleSet samples_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InputError("samples CSV: empty file");
    const auto header = split_csv_line(line);
    if (header.size() < 4 || header[0] != "node" || header[1] != "set" || header[2] != "idx")
        throw InputError("samples CSV: header must be node,set,idx,x1,..");
    const int d = static_cast<int>(header.size()) - 3;
    for (int c = 0; c < d; ++c)
        if (header[static_cast<std::size_t>(3 + c)] != "x" + std::to_string(c + 1))
            throw InputError("samples CSV: coordinate columns must be x1,..,xd");

    struct Row {
        int node, idx;
        bool is_p;
        std::vector<double> x;
    };
    std::vector<Row> rows;
    int max_node = -1, max_p = -1, max_q = -1;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (static_cast<int>(f.size()) != 3 + d)
            throw InputError("samples CSV line " + std::to_string(lineno) + ": expected " +
                             std::to_string(3 + d) + " fields");
        Row r;
        try {
            r.node = std::stoi(f[0]);
            r.idx = std::stoi(f[2]);
            r.x.reserve(static_cast<std::size_t>(d));
            for (int c = 0; c < d; ++c) r.x.push_back(std::stod(f[static_cast<std::size_t>(3 + c)]));
        } catch (const std::exception&) {
            throw InputError("samples CSV line " + std::to_string(lineno) + ": bad number");
        }
        if (f[1] == "p") r.is_p = true;
        else if (f[1] == "q") r.is_p = false;
        else throw InputError("samples CSV line " + std::to_string(lineno) + ": set must be p or q");
        if (r.node < 0 || r.idx < 0)
            throw InputError("samples CSV line " + std::to_string(lineno) + ": negative index");
        max_node = std::max(max_node, r.node);
        (r.is_p ? max_p : max_q) = std::max(r.is_p ? max_p : max_q, r.idx);
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw InputError("samples CSV: no data rows");
    const int num_nodes = max_node + 1, n = max_p + 1, np = max_q + 1;
    if (n < 1 || np < 1) throw InputError("samples CSV: both sets p and q are required");

    NodeSampleSet s;
    s.X.assign(static_cast<std::size_t>(num_nodes), Matrix::Zero(n, d));
    s.Xp.assign(static_cast<std::size_t>(num_nodes), Matrix::Zero(np, d));
    std::vector<std::vector<char>> seen_p(static_cast<std::size_t>(num_nodes),
                                          std::vector<char>(static_cast<std::size_t>(n), 0));
    std::vector<std::vector<char>> seen_q(static_cast<std::size_t>(num_nodes),
                                          std::vector<char>(static_cast<std::size_t>(np), 0));
    for (const auto& r : rows) {
        auto& seen = r.is_p ? seen_p : seen_q;
        const int limit = r.is_p ? n : np;
        if (r.idx >= limit)
            throw InputError("samples CSV: index out of range at node " + std::to_string(r.node));
        auto& flag = seen[static_cast<std::size_t>(r.node)][static_cast<std::size_t>(r.idx)];
        if (flag)
            throw InputError("samples CSV: duplicate (node,set,idx) = (" + std::to_string(r.node) +
                             "," + (r.is_p ? "p" : "q") + "," + std::to_string(r.idx) + ")");
        flag = 1;
        Matrix& m = (r.is_p ? s.X : s.Xp)[static_cast<std::size_t>(r.node)];
        for (int c = 0; c < d; ++c) m(r.idx, c) = r.x[static_cast<std::size_t>(c)];
    }
    for (int v = 0; v < num_nodes; ++v) {
        for (int i = 0; i < n; ++i)
            if (!seen_p[static_cast<std::size_t>(v)][static_cast<std::size_t>(i)])
                throw InputError("samples CSV: missing (node,set,idx) = (" + std::to_string(v) +
                                 ",p," + std::to_string(i) + ")");
        for (int i = 0; i < np; ++i)
            if (!seen_q[static_cast<std::size_t>(v)][static_cast<std::size_t>(i)])
                throw InputError("samples CSV: missing (node,set,idx) = (" + std::to_string(v) +
                                 ",q," + std::to_string(i) + ")");
    }
    s.validate();
    return s;
}

std::string config_to_json(const RunConfig& c) {
    std::string out = "{\n";
    out += "\"method\": \"" + method_name(c.method) + "\",\n";
    out += "\"alpha\": " + format_double(c.alpha) + ",\n";
    out += "\"n_perm\": " + std::to_string(c.n_perm) + ",\n";
    out += "\"pi_star\": " + format_double(c.pi_star) + ",\n";
    out += "\"seed\": " + std::to_string(c.seed) + ",\n";
    out += "\"anchors_max\": " + std::to_string(c.anchors_max) + ",\n";
    out += "\"tol\": " + format_double(c.tol) + ",\n";
    out += "\"max_iter\": " + std::to_string(c.max_iter) + ",\n";
    out += "\"eigen_floor\": " + format_double(c.eigen_floor) + ",\n";
    out += "\"cv_folds\": " + std::to_string(c.cv_folds) + ",\n";
    out += "\"threads\": " + std::to_string(c.threads);
    if (c.grid_override) {
        out += ",\n\"grid\": {\n\"sigmas\": ";
        append_double_array(out, c.grid_override->sigmas);
        out += ",\n\"gammas\": ";
        append_double_array(out, c.grid_override->gammas);
        out += ",\n\"lambdas\": ";
        append_double_array(out, c.grid_override->lambdas);
        out += "\n}";
    }
    out += "\n}\n";
    return out;
}

RunConfig config_from_json(const std::string& text) {
    const json j = parse_json(text, "config file");
    RunConfig c;
    if (j.contains("method")) {
        const json& m = j["method"];
        if (!m.is_string()) throw InputError("config file: \"method\" must be a string");
        c.method = method_from_string(m.get<std::string>());
    }
    if (j.contains("alpha")) c.alpha = num_field(j, "alpha", "config file");
    if (j.contains("n_perm")) c.n_perm = int_field(j, "n_perm", "config file");
    if (j.contains("pi_star")) c.pi_star = num_field(j, "pi_star", "config file");
    if (j.contains("seed")) {
        const json& f = j["seed"];
        if (!f.is_number_integer() && !f.is_number_unsigned())
            throw InputError("config file: \"seed\" must be an integer");
        c.seed = f.get<std::uint64_t>();
    }
    if (j.contains("anchors_max")) c.anchors_max = int_field(j, "anchors_max", "config file");
    if (j.contains("tol")) c.tol = num_field(j, "tol", "config file");
    if (j.contains("max_iter")) c.max_iter = int_field(j, "max_iter", "config file");
    if (j.contains("eigen_floor")) c.eigen_floor = num_field(j, "eigen_floor", "config file");
    if (j.contains("cv_folds")) c.cv_folds = int_field(j, "cv_folds", "config file");
    if (j.contains("threads")) c.threads = int_field(j, "threads", "config file");
    if (j.contains("grid") && !j["grid"].is_null()) {
        const json& g = j["grid"];
        HyperGrid hg;
        hg.sigmas = double_array(field(g, "sigmas", "config grid"), "config grid sigmas");
        hg.gammas = double_array(field(g, "gammas", "config grid"), "config grid gammas");
        hg.lambdas = double_array(field(g, "lambdas", "config grid"), "config grid lambdas");
        c.grid_override = std::move(hg);
    }
    c.validate();
    return c;
}

namespace {

void append_hyperparams(std::string& out, const Hyperparams& hp) {
    out += "{\"alpha\": " + format_double(hp.alpha) +
           ", \"lambda\": " + format_double(hp.lambda) +
           ", \"gamma\": " + format_double(hp.gamma) +
           ", \"sigma\": " + format_double(hp.sigma) + "}";
}

Hyperparams hyperparams_from_json(const json& j, const char* what) {
    Hyperparams hp;
    hp.alpha = num_field(j, "alpha", what);
    hp.lambda = num_field(j, "lambda", what);
    hp.gamma = num_field(j, "gamma", what);
    hp.sigma = num_field(j, "sigma", what);
    return hp;
}

} // namespace

std::string test_result_to_json(const TestResult& r) {
    std::string out = "{\n";
    out += "\"method\": \"" + r.method + "\",\n";
    out += "\"n_perm\": " + std::to_string(r.n_perm) + ",\n";
    out += "\"pi_star\": " + format_double(r.pi_star) + ",\n";
    out += "\"seed\": " + std::to_string(r.seed) + ",\n";
    out += "\"symmetric\": " + std::string(r.symmetric ? "true" : "false") + ",\n";
    out += "\"has_hyperparams\": " + std::string(r.has_hyperparams ? "true" : "false") + ",\n";
    out += "\"objective_forward\": " + format_double(r.objective_forward) + ",\n";
    out += "\"objective_reverse\": " + format_double(r.objective_reverse) + ",\n";
    out += "\"hyperparams_forward\": ";
    append_hyperparams(out, r.hp_forward);
    out += ",\n\"hyperparams_reverse\": ";
    append_hyperparams(out, r.hp_reverse);
    out += ",\n\"nodes\": [";
    std::vector<char> rej(r.S.size(), 0);
    for (int v : r.rejected) rej[static_cast<std::size_t>(v)] = 1;
    for (std::size_t v = 0; v < r.S.size(); ++v) {
        out += (v ? ",\n" : "\n");
        out += "{\"node\": " + std::to_string(v) + ", \"S\": " + format_double(r.S[v]) +
               ", \"S_rev\": " + format_double(r.S_rev[v]) + ", \"pi\": " + format_double(r.pi[v]) +
               ", \"pi_rev\": " + format_double(r.pi_rev[v]) +
               ", \"rejected\": " + (rej[v] ? "true" : "false") + "}";
    }
    out += "\n],\n\"rejected\": ";
    append_int_array(out, r.rejected);
    out += ",\n\"perm_max_forward\": ";
    append_double_array(out, r.perm_max_forward);
    out += ",\n\"perm_max_reverse\": ";
    append_double_array(out, r.perm_max_reverse);
    out += "\n}\n";
    return out;
}

TestResult test_result_from_json(const std::string& text) {
    const json j = parse_json(text, "result file");
    TestResult r;
    r.method = field(j, "method", "result file").get<std::string>();
    r.n_perm = int_field(j, "n_perm", "result file");
    r.pi_star = num_field(j, "pi_star", "result file");
    r.seed = field(j, "seed", "result file").get<std::uint64_t>();
    r.symmetric = field(j, "symmetric", "result file").get<bool>();
    r.has_hyperparams = field(j, "has_hyperparams", "result file").get<bool>();
    r.objective_forward = num_field(j, "objective_forward", "result file");
    r.objective_reverse = num_field(j, "objective_reverse", "result file");
    r.hp_forward = hyperparams_from_json(field(j, "hyperparams_forward", "result file"),
                                         "result hyperparams");
    r.hp_reverse = hyperparams_from_json(field(j, "hyperparams_reverse", "result file"),
                                         "result hyperparams");
    const json& nodes = field(j, "nodes", "result file");
    if (!nodes.is_array()) throw InputError("result file: \"nodes\" must be an array");
    const std::size_t nn = nodes.size();
    r.S.resize(nn);
    r.S_rev.resize(nn);
    r.pi.resize(nn);
    r.pi_rev.resize(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        const json& rec = nodes[i];
        const int v = int_field(rec, "node", "result node record");
        if (v < 0 || static_cast<std::size_t>(v) >= nn)
            throw InputError("result file: node id out of range");
        r.S[static_cast<std::size_t>(v)] = num_field(rec, "S", "result node record");
        r.S_rev[static_cast<std::size_t>(v)] = num_field(rec, "S_rev", "result node record");
        r.pi[static_cast<std::size_t>(v)] = num_field(rec, "pi", "result node record");
        r.pi_rev[static_cast<std::size_t>(v)] = num_field(rec, "pi_rev", "result node record");
    }
    r.rejected = int_array(field(j, "rejected", "result file"), "result rejected");
    r.perm_max_forward =
        double_array(field(j, "perm_max_forward", "result file"), "result perm max");
    r.perm_max_reverse =
        double_array(field(j, "perm_max_reverse", "result file"), "result perm max");
    return r;
}

std::string instance_to_json(const LabeledInstance& inst) {
    std::string out = "{\n\"graph\": ";
    out += graph_to_json(inst.graph);
    // graph_to_json ends with "}\n"; splice the pieces with explicit commas.
    out.pop_back(); // newline
    out += ",\n\"samples\": ";
    out += samples_to_json(inst.samples);
    out.pop_back();
    out += ",\n\"affected\": ";
    append_int_array(out, inst.affected);
    out += "\n}\n";
    return out;
}

LabeledInstance instance_from_json(const std::string& text) {
    const json j = parse_json(text, "instance file");
    LabeledInstance inst;
    inst.graph = graph_from_json(field(j, "graph", "instance file").dump());
    inst.samples = samples_from_json(field(j, "samples", "instance file").dump());
    inst.affected = int_array(field(j, "affected", "instance file"), "instance affected");
    for (int v : inst.affected)
        if (v < 0 || v >= inst.graph.num_nodes())
            throw InputError("instance file: affected node id out of range");
    if (inst.samples.num_nodes() != inst.graph.num_nodes())
        throw InputError("instance file: graph and samples disagree on node count");
    return inst;
}

std::string bench_report_to_json(const BenchReport& r) {
    std::string out = "{\n";
    out += "\"method\": \"" + r.method + "\",\n";
    out += "\"scenario\": \"" + r.scenario + "\",\n";
    out += "\"n\": " + std::to_string(r.n) + ",\n";
    out += "\"n_prime\": " + std::to_string(r.n_prime) + ",\n";
    out += "\"afroc_auc\": " + format_double(r.afroc_auc) + ",\n";
    out += "\"roc_auc\": " + format_double(r.roc_auc) + ",\n";
    out += "\"num_null_instances\": " + std::to_string(r.num_null_instances) + ",\n";
    out += "\"num_alt_instances\": " + std::to_string(r.num_alt_instances) + ",\n";
    out += "\"runtime_seconds\": " + format_double(r.runtime_seconds) + "\n";
    out += "}\n";
    return out;
}

std::string bench_report_to_csv(const BenchReport& r) {
    std::string out =
        "method,scenario,n,n_prime,afroc_auc,roc_auc,num_null_instances,num_alt_instances,"
        "runtime_seconds\n";
    out += r.method + ',' + r.scenario + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.n_prime) + ',' + format_double(r.afroc_auc) + ',' +
           format_double(r.roc_auc) + ',' + std::to_string(r.num_null_instances) + ',' +
           std::to_string(r.num_alt_instances) + ',' + format_double(r.runtime_seconds) + '\n';
    return out;
}

std::string curve_to_csv(const std::vector<CurvePoint>& curve) {
    std::string out = "threshold,x,y\n";
    for (const auto& p : curve)
        out += format_double(p.threshold) + "," + format_double(p.x) + "," + format_double(p.y) +
               "\n";
    return out;
}

std::string bench_stats_to_json(const std::vector<std::vector<double>>& null_stats,
                                const std::vector<AltRun>& alt_runs) {
    std::string out = "{\n\"null_stats\": [";
    for (std::size_t i = 0; i < null_stats.size(); ++i) {
        out += (i ? ",\n" : "\n");
        append_double_array(out, null_stats[i]);
    }
    out += "\n],\n\"alt_runs\": [";
    for (std::size_t i = 0; i < alt_runs.size(); ++i) {
        out += (i ? ",\n" : "\n");
        out += "{\"stats\": ";
        append_double_array(out, alt_runs[i].stats);
        out += ", \"affected\": ";
        append_int_array(out, alt_runs[i].affected);
        out += "}";
    }
    out += "\n]\n}\n";
    return out;
}

void bench_stats_from_json(const std::string& text,
                           std::vector<std::vector<double>>& null_stats,
                           std::vector<AltRun>& alt_runs) {
    const json j = parse_json(text, "statistics file");
    const json& jn = field(j, "null_stats", "statistics file");
    const json& ja = field(j, "alt_runs", "statistics file");
    if (!jn.is_array() || !ja.is_array())
        throw InputError("statistics file: null_stats and alt_runs must be arrays");
    null_stats.clear();
    for (const auto& e : jn) null_stats.push_back(double_array(e, "statistics null_stats"));
    alt_runs.clear();
    for (const auto& e : ja) {
        AltRun run;
        run.stats = double_array(field(e, "stats", "statistics alt run"), "statistics alt run");
        run.affected =
            int_array(field(e, "affected", "statistics alt run"), "statistics alt run");
        alt_runs.push_back(std::move(run));
    }
}

std::vector<Station> stations_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InputError("stations CSV: empty file");
    const auto header = split_csv_line(line);
    if (header.size() != 3 || header[0] != "id" || header[1] != "lat" || header[2] != "lon")
        throw InputError("stations CSV: header must be id,lat,lon");
    std::vector<Station> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != 3)
            throw InputError("stations CSV line " + std::to_string(lineno) + ": expected 3 fields");
        Station st;
        st.id = f[0];
        try {
            st.lat = std::stod(f[1]);
            st.lon = std::stod(f[2]);
        } catch (const std::exception&) {
            throw InputError("stations CSV line " + std::to_string(lineno) + ": bad coordinate");
        }
        if (st.id.empty() || st.lat < -90.0 || st.lat > 90.0 || st.lon < -180.0 || st.lon > 180.0)
            throw InputError("stations CSV line " + std::to_string(lineno) + ": invalid station");
        out.push_back(std::move(st));
    }
    if (out.empty()) throw InputError("stations CSV: no stations");
    return out;
}

Waveform waveform_from_json(const std::string& text) {
    const json j = parse_json(text, "waveform file");
    Waveform w;
    w.fs = num_field(j, "fs", "waveform file");
    if (j.contains("event_index")) w.event_index = field(j, "event_index", "waveform file").get<long>();
    const json& ch = field(j, "channels", "waveform file");
    if (!ch.is_array() || ch.empty())
        throw InputError("waveform file: \"channels\" must be a non-empty array");
    for (const auto& c : ch) w.channels.push_back(double_array(c, "waveform channel"));
    for (const auto& c : w.channels)
        if (c.size() != w.channels.front().size())
            throw InputError("waveform file: channels must share one length");
    return w;
}

} // namespace ctst
