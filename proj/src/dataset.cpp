#include "humor/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace humor {

using nlohmann::json;

const char* to_string(PostKind k) {
    switch (k) {
        case PostKind::write: return "write";
        case PostKind::comment: return "comment";
        case PostKind::like: return "like";
    }
    return "?";
}

PostKind post_kind_from_string(const std::string& s) {
    if (s == "write") return PostKind::write;
    if (s == "comment") return PostKind::comment;
    if (s == "like") return PostKind::like;
    throw ParseError("unknown post link kind \"" + s + "\" (expected write/comment/like)");
}

namespace {

std::unordered_map<std::string, int> index_of(const std::vector<std::string>& items) {
    std::unordered_map<std::string, int> m;
    m.reserve(items.size());
    for (int i = 0; i < static_cast<int>(items.size()); ++i) m.emplace(items[i], i);
    return m;
}

} // namespace

std::unordered_map<std::string, int> EsnGraph::user_index() const { return index_of(users); }
std::unordered_map<std::string, int> EsnGraph::group_index() const { return index_of(groups); }
std::unordered_map<std::string, int> EsnGraph::post_index() const { return index_of(posts); }

const std::vector<std::string>& default_seniority_stopwords() {
    static const std::vector<std::string> words = {
        "senior", "junior", "principal", "staff",     "lead",   "associate",
        "assistant", "chief", "head",   "vp",        "director", "i",
        "ii",     "iii",   "iv",        "intern"};
    return words;
}

JobTitle make_job_title(const std::string& raw,
                        const std::vector<std::string>& seniority_stopwords) {
    // lowercase, split on anything that is not alphanumeric
    std::vector<std::string> ordered;
    std::string cur;
    for (char c : raw) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            ordered.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) ordered.push_back(cur);

    JobTitle title;
    title.raw = raw;
    if (ordered.empty()) return title;  // tokens stay empty; validate() reports it

    const std::unordered_set<std::string> stop(seniority_stopwords.begin(),
                                               seniority_stopwords.end());
    title.root_term = ordered.back();  // fallback when every token is a seniority word
    for (auto it = ordered.rbegin(); it != ordered.rend(); ++it) {
        if (!stop.count(*it)) {
            title.root_term = *it;
            break;
        }
    }

    std::sort(ordered.begin(), ordered.end());
    ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());
    title.tokens = std::move(ordered);
    return title;
}

std::vector<EmployeeId> OrgChart::ids() const {
    std::vector<EmployeeId> out;
    out.reserve(employees.size());
    for (const auto& e : employees) out.push_back(e.id);
    return out;
}

std::unordered_map<std::string, int> OrgChart::id_index() const {
    std::unordered_map<std::string, int> m;
    m.reserve(employees.size());
    for (int i = 0; i < static_cast<int>(employees.size()); ++i) m.emplace(employees[i].id, i);
    return m;
}

std::vector<int> OrgChart::parents() const {
    const auto idx = id_index();
    std::vector<int> parent(employees.size(), -1);
    for (int i = 0; i < static_cast<int>(employees.size()); ++i) {
        const auto& e = employees[i];
        if (!e.manager) continue;
        auto it = idx.find(*e.manager);
        if (it == idx.end())
            throw ValidationError("employee \"" + e.id + "\" has unknown manager \"" + *e.manager + "\"");
        parent[i] = it->second;
    }
    return parent;
}

Eigen::MatrixXd AlignmentMap::to_matrix(int n_employees) const {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<int>(user_to_employee.size()), n_employees);
    for (int i = 0; i < static_cast<int>(user_to_employee.size()); ++i) {
        const int j = user_to_employee[i];
        if (j >= 0 && j < n_employees) t(i, j) = 1.0;
    }
    return t;
}

AlignmentMap derive_alignment(const EsnGraph& graph, const OrgChart& chart) {
    const auto idx = chart.id_index();
    AlignmentMap align;
    align.user_to_employee.reserve(graph.users.size());
    for (const auto& u : graph.users) {
        auto it = idx.find(u);
        align.user_to_employee.push_back(it == idx.end() ? -1 : it->second);
    }
    return align;
}

namespace {

void check_unique(const std::vector<std::string>& items, const char* what,
                  std::vector<Violation>& out) {
    std::unordered_set<std::string> seen;
    for (const auto& id : items) {
        if (id.empty()) out.push_back({"empty-id", std::string(what) + " with empty id"});
        if (!seen.insert(id).second)
            out.push_back({"duplicate-id", std::string(what) + " \"" + id + "\" declared twice"});
    }
}

} // namespace

std::vector<Violation> validate(const EsnGraph& graph, const OrgChart& chart,
                                const AlignmentMap& align) {
    std::vector<Violation> out;

    check_unique(graph.users, "ESN user", out);
    check_unique(graph.groups, "ESN group", out);
    check_unique(graph.posts, "ESN post", out);

    const auto users = graph.user_index();
    const auto groups = graph.group_index();
    const auto posts = graph.post_index();

    std::set<std::pair<std::string, std::string>> seen_follows;
    for (const auto& [src, dst] : graph.follows) {
        if (!users.count(src))
            out.push_back({"dangling-edge", "follow edge references unknown user \"" + src + "\""});
        if (!users.count(dst))
            out.push_back({"dangling-edge", "follow edge references unknown user \"" + dst + "\""});
        if (src == dst)
            out.push_back({"self-loop", "follow edge from \"" + src + "\" to itself"});
        if (!seen_follows.insert({src, dst}).second)
            out.push_back({"duplicate-edge", "follow edge (" + src + ", " + dst + ") repeated"});
    }

    std::set<std::pair<std::string, std::string>> seen_memberships;
    for (const auto& [user, group] : graph.memberships) {
        if (!users.count(user))
            out.push_back({"dangling-edge", "membership references unknown user \"" + user + "\""});
        if (!groups.count(group))
            out.push_back({"dangling-edge", "membership references unknown group \"" + group + "\""});
        if (!seen_memberships.insert({user, group}).second)
            out.push_back({"duplicate-edge", "membership (" + user + ", " + group + ") repeated"});
    }

    std::set<std::tuple<std::string, std::string, int>> seen_links;
    for (const auto& link : graph.post_links) {
        if (!users.count(link.user))
            out.push_back({"dangling-edge", "post link references unknown user \"" + link.user + "\""});
        if (!posts.count(link.post))
            out.push_back({"dangling-edge", "post link references unknown post \"" + link.post + "\""});
        if (!seen_links.insert({link.user, link.post, static_cast<int>(link.kind)}).second)
            out.push_back({"duplicate-edge", "post link (" + link.user + ", " + link.post + ", " +
                                                 to_string(link.kind) + ") repeated"});
    }

    // chart: every employee declared once, exactly one root, parents form a tree
    {
        std::unordered_map<std::string, int> first_seen;
        for (int i = 0; i < static_cast<int>(chart.employees.size()); ++i) {
            const auto& e = chart.employees[i];
            if (e.id.empty()) out.push_back({"empty-id", "employee with empty id"});
            auto [it, fresh] = first_seen.emplace(e.id, i);
            if (!fresh)
                out.push_back({"duplicate-employee",
                               "employee \"" + e.id + "\" declared more than once (multiple managers)"});
        }

        const auto idx = chart.id_index();
        if (!idx.count(chart.root)) {
            out.push_back({"bad-root", "root \"" + chart.root + "\" is not a declared employee"});
        }

        for (const auto& e : chart.employees) {
            const bool is_root = e.id == chart.root;
            if (is_root && e.manager)
                out.push_back({"root-manager", "root \"" + e.id + "\" must not have a manager"});
            if (!is_root && !e.manager)
                out.push_back({"no-manager", "employee \"" + e.id + "\" has no manager"});
            if (e.manager && !idx.count(*e.manager))
                out.push_back({"dangling-edge",
                               "employee \"" + e.id + "\" reports to unknown manager \"" + *e.manager + "\""});
            if (e.manager && *e.manager == e.id)
                out.push_back({"self-loop", "employee \"" + e.id + "\" manages themselves"});
            if (e.title.tokens.empty())
                out.push_back({"empty-title", "employee \"" + e.id + "\" has an untokenizable title"});
            if (e.workplace.country.empty())
                out.push_back({"empty-workplace", "employee \"" + e.id + "\" has no country"});
            if (e.workplace.time_zone.empty())
                out.push_back({"empty-workplace", "employee \"" + e.id + "\" has no time zone"});
        }

        // reachability: walk the manager chain from each employee; chains that
        // revisit a node or exceed n hops indicate a cycle off the root
        if (out.empty()) {
            const auto parent = chart.parents();
            const int n = static_cast<int>(parent.size());
            for (int i = 0; i < n; ++i) {
                int cur = i, hops = 0;
                while (cur != -1 && hops <= n) {
                    cur = parent[cur];
                    ++hops;
                }
                if (hops > n)
                    out.push_back({"cycle", "employee \"" + chart.employees[i].id +
                                                "\" is not connected to the root"});
            }
        }
    }

    // alignment: total over users, injective into employees
    if (align.user_to_employee.size() != graph.users.size()) {
        out.push_back({"alignment-size", "alignment covers " +
                                             std::to_string(align.user_to_employee.size()) +
                                             " users, graph has " + std::to_string(graph.users.size())});
    } else {
        std::unordered_map<int, std::string> hit;
        for (int i = 0; i < static_cast<int>(graph.users.size()); ++i) {
            const int j = align.user_to_employee[i];
            if (j < 0 || j >= static_cast<int>(chart.employees.size())) {
                out.push_back({"unaligned-user",
                               "ESN user \"" + graph.users[i] + "\" has no chart employee"});
                continue;
            }
            auto [it, fresh] = hit.emplace(j, graph.users[i]);
            if (!fresh)
                out.push_back({"alignment-collision",
                               "users \"" + it->second + "\" and \"" + graph.users[i] +
                                   "\" both map to employee \"" + chart.employees[j].id + "\""});
        }
    }

    return out;
}

// ---------------------------------------------------------------------------
// JSON interchange

namespace {

json parse_text(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError(std::string(what) + ": not valid JSON");
    if (!j.is_object()) throw ParseError(std::string(what) + ": top level must be an object");
    return j;
}

std::vector<std::string> string_array(const json& j, const char* key, const char* what) {
    if (!j.contains(key)) throw ParseError(std::string(what) + ": missing key \"" + key + "\"");
    const auto& arr = j.at(key);
    if (!arr.is_array()) throw ParseError(std::string(what) + ": \"" + key + "\" must be an array");
    std::vector<std::string> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_string())
            throw ParseError(std::string(what) + ": \"" + key + "\" entries must be strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write \"" + path + "\"");
    out << text;
}

} // namespace

EsnGraph parse_esn_json(const std::string& text) {
    const json j = parse_text(text, "esn");
    EsnGraph g;
    g.users = string_array(j, "users", "esn");
    g.groups = string_array(j, "groups", "esn");
    g.posts = string_array(j, "posts", "esn");

    auto pair_list = [&](const char* key, auto push) {
        if (!j.contains(key)) throw ParseError(std::string("esn: missing key \"") + key + "\"");
        for (const auto& e : j.at(key)) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
                throw ParseError(std::string("esn: \"") + key + "\" entries must be [string, string]");
            push(e[0].get<std::string>(), e[1].get<std::string>());
        }
    };
    pair_list("follows", [&](std::string a, std::string b) { g.follows.emplace_back(a, b); });
    pair_list("memberships", [&](std::string a, std::string b) { g.memberships.emplace_back(a, b); });

    if (!j.contains("post_links")) throw ParseError("esn: missing key \"post_links\"");
    for (const auto& e : j.at("post_links")) {
        if (!e.is_array() || e.size() != 3 || !e[0].is_string() || !e[1].is_string() || !e[2].is_string())
            throw ParseError("esn: \"post_links\" entries must be [user, post, kind]");
        g.post_links.push_back(
            {e[0].get<std::string>(), e[1].get<std::string>(), post_kind_from_string(e[2].get<std::string>())});
    }
    return g;
}

OrgChart parse_chart_json(const std::string& text) {
    const json j = parse_text(text, "chart");
    OrgChart chart;
    if (!j.contains("root") || !j.at("root").is_string())
        throw ParseError("chart: missing string key \"root\"");
    chart.root = j.at("root").get<std::string>();

    if (j.contains("seniority_stopwords")) {
        chart.custom_stopwords = true;
        chart.seniority_stopwords = string_array(j, "seniority_stopwords", "chart");
    } else {
        chart.seniority_stopwords = default_seniority_stopwords();
    }

    if (!j.contains("employees") || !j.at("employees").is_array())
        throw ParseError("chart: missing array key \"employees\"");
    for (const auto& e : j.at("employees")) {
        if (!e.is_object()) throw ParseError("chart: employee entries must be objects");
        for (const char* key : {"id", "manager", "title", "country", "time_zone"})
            if (!e.contains(key))
                throw ParseError(std::string("chart: employee missing key \"") + key + "\"");
        OrgChart::Employee emp;
        emp.id = e.at("id").get<std::string>();
        if (!e.at("manager").is_null()) emp.manager = e.at("manager").get<std::string>();
        emp.title = make_job_title(e.at("title").get<std::string>(), chart.seniority_stopwords);
        emp.workplace.country = e.at("country").get<std::string>();
        emp.workplace.time_zone = e.at("time_zone").get<std::string>();
        chart.employees.push_back(std::move(emp));
    }
    return chart;
}

Dataset load_dataset(const std::string& esn_path, const std::string& chart_path) {
    Dataset ds;
    ds.esn = parse_esn_json(read_file(esn_path));
    ds.chart = parse_chart_json(read_file(chart_path));
    ds.align = derive_alignment(ds.esn, ds.chart);
    auto violations = validate(ds.esn, ds.chart, ds.align);
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return ds;
}

std::string esn_to_json(const EsnGraph& graph) {
    json j;
    j["users"] = graph.users;
    j["groups"] = graph.groups;
    j["posts"] = graph.posts;
    j["follows"] = json::array();
    for (const auto& [a, b] : graph.follows) j["follows"].push_back({a, b});
    j["memberships"] = json::array();
    for (const auto& [a, b] : graph.memberships) j["memberships"].push_back({a, b});
    j["post_links"] = json::array();
    for (const auto& link : graph.post_links)
        j["post_links"].push_back({link.user, link.post, to_string(link.kind)});
    return j.dump(2) + "\n";
}

std::string chart_to_json(const OrgChart& chart) {
    json j;
    j["root"] = chart.root;
    j["employees"] = json::array();
    for (const auto& e : chart.employees) {
        json rec;
        rec["id"] = e.id;
        rec["manager"] = e.manager ? json(*e.manager) : json(nullptr);
        rec["title"] = e.title.raw;
        rec["country"] = e.workplace.country;
        rec["time_zone"] = e.workplace.time_zone;
        j["employees"].push_back(std::move(rec));
    }
    if (chart.custom_stopwords) j["seniority_stopwords"] = chart.seniority_stopwords;
    return j.dump(2) + "\n";
}

void save_esn(const EsnGraph& graph, const std::string& path) { write_file(path, esn_to_json(graph)); }
void save_chart(const OrgChart& chart, const std::string& path) { write_file(path, chart_to_json(chart)); }

} // namespace humor
