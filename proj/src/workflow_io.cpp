#include <mcsched/workflow.hpp>

#include <mcsched/error.hpp>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mcsched {

namespace {

using nlohmann::json;
namespace pt = boost::property_tree;

double bytes_to_megabits(double bytes) { return bytes * 8.0 / 1e6; }

json const & require(json const & obj, char const * key, std::string const & where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw IngestionError(where + ": missing field '" + key + "'");
    }
    return *it;
}

double require_number(json const & obj, char const * key, std::string const & where) {
    json const & v = require(obj, key, where);
    if (!v.is_number()) {
        throw IngestionError(where + "." + key + ": expected a number");
    }
    return v.get<double>();
}

std::string require_string(json const & obj, char const * key, std::string const & where) {
    json const & v = require(obj, key, where);
    if (!v.is_string()) {
        throw IngestionError(where + "." + key + ": expected a string");
    }
    return v.get<std::string>();
}

double parse_double(std::string const & text, std::string const & where) {
    try {
        std::size_t used = 0;
        double const v = std::stod(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument(text);
        }
        return v;
    } catch (std::exception const &) {
        throw IngestionError(where + ": '" + text + "' is not a number");
    }
}

} // namespace

std::optional<WorkflowFormat> parse_format(std::string_view name) {
    if (name == "dax" || name == "dax-xml" || name == "xml") {
        return WorkflowFormat::dax_xml;
    }
    if (name == "json" || name == "native-json") {
        return WorkflowFormat::native_json;
    }
    return std::nullopt;
}

WorkflowFormat format_from_path(std::filesystem::path const & path) {
    auto const ext = path.extension().string();
    if (ext == ".xml" || ext == ".dax") {
        return WorkflowFormat::dax_xml;
    }
    return WorkflowFormat::native_json;
}

Workflow parse_native_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (json::parse_error const & e) {
        throw IngestionError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw IngestionError("workflow document must be an object");
    }
    json const & tasks = require(doc, "tasks", "workflow");
    json const & edges = require(doc, "edges", "workflow");
    if (!tasks.is_array() || !edges.is_array()) {
        throw IngestionError("workflow: 'tasks' and 'edges' must be arrays");
    }

    std::vector<Task> out_tasks;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        std::string const where = "tasks[" + std::to_string(i) + "]";
        Task t;
        t.id = require_string(tasks[i], "id", where);
        t.work = require_number(tasks[i], "work_mi", where);
        if (!ids.insert(t.id).second) {
            throw IngestionError(where + ": duplicate task id " + t.id);
        }
        out_tasks.push_back(std::move(t));
    }

    std::vector<EdgeSpec> out_edges;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        std::string const where = "edges[" + std::to_string(i) + "]";
        json const & e = edges[i];
        EdgeSpec s;
        s.src = require_string(e, "src", where);
        s.dst = require_string(e, "dst", where);
        s.size = require_number(e, "size_mb", where);
        if (e.contains("sec_weight")) {
            s.sec_weight = require_number(e, "sec_weight", where);
        }
        if (e.contains("vuln_cap") && !e.at("vuln_cap").is_null()) {
            s.vuln_cap = require_number(e, "vuln_cap", where);
        }
        if (!ids.count(s.src) || !ids.count(s.dst)) {
            throw IngestionError(where + ": dangling task reference " + s.src + " -> " + s.dst);
        }
        out_edges.push_back(std::move(s));
    }

    try {
        return Workflow::build(std::move(out_tasks), out_edges);
    } catch (StructuralError const & e) {
        throw IngestionError(std::string("invalid workflow: ") + e.what());
    }
}

Workflow parse_dax(std::string_view text, DaxOptions const & dax) {
    pt::ptree doc;
    try {
        std::istringstream in{std::string(text)};
        pt::read_xml(in, doc);
    } catch (pt::xml_parser_error const & e) {
        throw IngestionError("malformed DAX: " + e.message() + " at line " + std::to_string(e.line()));
    }
    auto const root = doc.get_child_optional("adag");
    if (!root) {
        throw IngestionError("DAX: missing <adag> root element");
    }

    struct FileUse {
        std::optional<std::size_t> producer;
        std::optional<double> size; // bytes, from the producing element
        std::vector<std::pair<std::size_t, std::optional<double>>> consumers;
    };

    std::vector<Task> tasks;
    std::set<std::string> declared;
    std::map<std::string, FileUse> files;
    std::set<std::string> ids;

    for (auto const & [tag, node] : *root) {
        if (tag == "file") {
            if (auto name = node.get_optional<std::string>("<xmlattr>.name")) {
                declared.insert(*name);
            }
            continue;
        }
        if (tag != "job") {
            continue;
        }
        auto const id = node.get_optional<std::string>("<xmlattr>.id");
        if (!id) {
            throw IngestionError("DAX job #" + std::to_string(tasks.size()) + ": missing id");
        }
        std::string const where = "DAX job " + *id;
        if (!ids.insert(*id).second) {
            throw IngestionError(where + ": duplicate job id");
        }
        auto const runtime = node.get_optional<std::string>("<xmlattr>.runtime");
        if (!runtime) {
            throw IngestionError(where + ": missing runtime");
        }
        double const seconds = parse_double(*runtime, where + " runtime");
        if (seconds < 0.0) {
            throw IngestionError(where + ": negative runtime");
        }
        std::size_t const index = tasks.size();
        tasks.push_back(Task{*id, seconds * dax.reference_mips, false});

        for (auto const & [child_tag, use] : node) {
            if (child_tag != "uses") {
                continue;
            }
            auto file = use.get_optional<std::string>("<xmlattr>.file");
            if (!file) {
                file = use.get_optional<std::string>("<xmlattr>.name");
            }
            if (!file) {
                throw IngestionError(where + ": <uses> without a file attribute");
            }
            std::string const use_where = where + " uses " + *file;
            auto const link = use.get_optional<std::string>("<xmlattr>.link");
            std::optional<double> size;
            if (auto s = use.get_optional<std::string>("<xmlattr>.size")) {
                size = parse_double(*s, use_where + " size");
                if (*size < 0.0) {
                    throw IngestionError(use_where + ": negative size");
                }
            }
            FileUse & f = files[*file];
            if (link && *link == "output") {
                if (f.producer) {
                    throw IngestionError(use_where + ": file has two producers");
                }
                f.producer = index;
                f.size = size;
            } else if (link && *link == "input") {
                f.consumers.emplace_back(index, size);
            } else {
                throw IngestionError(use_where + ": link must be input or output");
            }
        }
    }

    std::map<std::pair<std::size_t, std::size_t>, double> volume;
    for (auto const & [name, f] : files) {
        if (!f.producer) {
            if (!f.consumers.empty() && !declared.count(name) && !dax.allow_external_inputs) {
                throw IngestionError("DAX job " + tasks[f.consumers.front().first].id +
                                     ": input file " + name + " has no producer and is not declared");
            }
            continue;
        }
        for (auto const & [consumer, consumer_size] : f.consumers) {
            if (consumer == *f.producer) {
                continue;
            }
            auto const bytes = f.size ? f.size : consumer_size;
            if (!bytes) {
                throw IngestionError("DAX file " + name + ": missing size");
            }
            volume[{*f.producer, consumer}] += bytes_to_megabits(*bytes);
        }
    }

    std::vector<DataEdge> edges;
    for (auto const & [pair, mb] : volume) {
        edges.push_back(DataEdge{pair.first, pair.second, mb, 1.0, std::nullopt});
    }
    try {
        return Workflow::build(std::move(tasks), std::move(edges));
    } catch (StructuralError const & e) {
        throw IngestionError(std::string("invalid DAX workflow: ") + e.what());
    }
}

Workflow parse_workflow(std::filesystem::path const & path, WorkflowFormat format,
                        DaxOptions const & dax) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestionError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        if (format == WorkflowFormat::dax_xml) {
            return parse_dax(buf.str(), dax);
        }
        return parse_native_json(buf.str());
    } catch (IngestionError const & e) {
        throw IngestionError(path.string() + ": " + e.what());
    }
}

std::string to_native_json(Workflow const & w) {
    nlohmann::ordered_json doc;
    doc["tasks"] = nlohmann::ordered_json::array();
    doc["edges"] = nlohmann::ordered_json::array();
    for (Task const & t : w.tasks()) {
        if (t.is_virtual) {
            continue;
        }
        doc["tasks"].push_back({{"id", t.id}, {"work_mi", t.work}});
    }
    for (std::size_t h = 0; h < w.edges().size(); ++h) {
        if (w.touches_virtual(h)) {
            continue;
        }
        DataEdge const & e = w.edge(h);
        nlohmann::ordered_json row = {{"src", w.task(e.src).id},
                                      {"dst", w.task(e.dst).id},
                                      {"size_mb", e.size},
                                      {"sec_weight", e.sec_weight}};
        if (e.vuln_cap) {
            row["vuln_cap"] = *e.vuln_cap;
        }
        doc["edges"].push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

} // namespace mcsched
