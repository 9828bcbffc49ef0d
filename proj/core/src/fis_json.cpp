#include "orcafl/fis_json.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace orcafl::fis {

namespace {

using nlohmann::json;

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

FuzzyVariable parse_variable(const json& j) {
    const auto name = j.at("name").get<std::string>();
    const auto& uni = j.at("universe");
    if (!uni.is_array() || uni.size() != 2) {
        throw FisFormatError("variable '" + name + "': universe must be [lo, hi]");
    }
    std::vector<FuzzyTerm> terms;
    for (const auto& t : j.at("terms")) {
        const auto& tri = t.at("trimf");
        if (!tri.is_array() || tri.size() != 3) {
            throw FisFormatError("variable '" + name + "': trimf must be [a, b, c]");
        }
        terms.push_back({t.at("label").get<std::string>(),
                         {tri[0].get<double>(), tri[1].get<double>(), tri[2].get<double>()}});
    }
    return FuzzyVariable(name, uni[0].get<double>(), uni[1].get<double>(), std::move(terms));
}

json variable_to_json(const FuzzyVariable& var) {
    json j;
    j["name"] = var.name();
    j["universe"] = {var.lo(), var.hi()};
    json terms = json::array();
    for (const auto& t : var.terms()) {
        terms.push_back({{"label", t.label}, {"trimf", {t.mf.a, t.mf.b, t.mf.c}}});
    }
    j["terms"] = std::move(terms);
    return j;
}

}  // namespace

FuzzyInferenceSystem parse_fis(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        throw FisFormatError("FIS syntax error at line " + std::to_string(line) + ", column " +
                             std::to_string(col) + ": " + e.what());
    }
    try {
        std::vector<FuzzyVariable> inputs;
        for (const auto& in : doc.at("inputs")) {
            inputs.push_back(parse_variable(in));
        }
        FuzzyVariable output = parse_variable(doc.at("output"));

        const auto& jrules = doc.at("rules");
        if (!jrules.is_array() || jrules.empty()) {
            throw FisFormatError("FIS: empty rules section cannot cover any input");
        }
        std::vector<FuzzyRule> rules;
        for (std::size_t r = 0; r < jrules.size(); ++r) {
            const auto& jr = jrules[r];
            const auto& cond = jr.at("if");
            if (cond.size() != inputs.size()) {
                throw FisFormatError("rule " + std::to_string(r) +
                                     ": needs one antecedent label per input");
            }
            FuzzyRule rule;
            for (std::size_t k = 0; k < inputs.size(); ++k) {
                const auto label = cond[k].get<std::string>();
                const int idx = inputs[k].term_index(label);
                if (idx < 0) {
                    throw FisFormatError("rule " + std::to_string(r) + ": unknown term '" +
                                         label + "' for input '" + inputs[k].name() + "'");
                }
                rule.antecedent.push_back(idx);
            }
            const auto then = jr.at("then").get<std::string>();
            rule.consequent = output.term_index(then);
            if (rule.consequent < 0) {
                throw FisFormatError("rule " + std::to_string(r) + ": unknown output term '" +
                                     then + "'");
            }
            rules.push_back(std::move(rule));
        }
        const int resolution = doc.value("defuzz_resolution", 1001);
        return FuzzyInferenceSystem(std::move(inputs), std::move(output), std::move(rules),
                                    resolution);
    } catch (const FisFormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw FisFormatError(std::string("FIS: ") + e.what());
    }
}

FuzzyInferenceSystem parse_fis_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FisFormatError("cannot open FIS file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_fis(buf.str());
}

std::string serialize_fis(const FuzzyInferenceSystem& fis) {
    json doc;
    doc["inputs"] = json::array();
    for (const auto& in : fis.inputs()) {
        doc["inputs"].push_back(variable_to_json(in));
    }
    doc["output"] = variable_to_json(fis.output());
    json rules = json::array();
    for (const auto& rule : fis.rules()) {
        json cond = json::array();
        for (std::size_t k = 0; k < rule.antecedent.size(); ++k) {
            cond.push_back(fis.inputs()[k].terms()[std::size_t(rule.antecedent[k])].label);
        }
        rules.push_back(
            {{"if", std::move(cond)},
             {"then", fis.output().terms()[std::size_t(rule.consequent)].label}});
    }
    doc["rules"] = std::move(rules);
    doc["defuzz_resolution"] = fis.defuzz_resolution();
    return doc.dump(2) + "\n";
}

void write_fis_file(const FuzzyInferenceSystem& fis, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw FisFormatError("cannot write FIS file: " + path.string());
    }
    out << serialize_fis(fis);
}

}  // namespace orcafl::fis
