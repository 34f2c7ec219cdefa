#include "dht/json_io.hpp"

#include <cstdio>
#include <vector>

#include "json.hpp"

namespace dht {

namespace {

using nlohmann::json;

json nest_probs(const JointDistribution& d, std::size_t level, std::size_t base,
                const std::vector<std::size_t>& strides) {
    if (level == d.rank() - 1) {
        json arr = json::array();
        for (std::size_t i = 0; i < d.card(level); ++i) arr.push_back(d[base + i]);
        return arr;
    }
    json arr = json::array();
    for (std::size_t i = 0; i < d.card(level); ++i)
        arr.push_back(nest_probs(d, level + 1, base + i * strides[level], strides));
    return arr;
}

std::vector<std::size_t> strides_of(const JointDistribution& d) {
    std::vector<std::size_t> s(d.rank(), 1);
    for (std::size_t i = d.rank(); i-- > 1;) s[i - 1] = s[i] * d.card(i);
    return s;
}

void flatten_probs(const json& node, std::size_t level,
                   const std::vector<std::size_t>& cards, std::vector<double>& out) {
    if (!node.is_array() || node.size() != cards[level])
        throw ValidationError("distribution_from_json: field 'probs' nesting does not match 'cards'");
    if (level == cards.size() - 1) {
        for (const auto& v : node) {
            if (!v.is_number())
                throw ValidationError("distribution_from_json: field 'probs' contains a non-number");
            out.push_back(v.get<double>());
        }
        return;
    }
    for (const auto& child : node) flatten_probs(child, level + 1, cards, out);
}

json parse_or_throw(const std::string& text, const char* who) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw ValidationError(std::string(who) + ": malformed JSON input");
    return j;
}

json distribution_to_json(const JointDistribution& d) {
    json j;
    j["axes"] = json::array();
    j["cards"] = json::array();
    for (const auto& ax : d.axes()) {
        j["axes"].push_back(ax.name);
        j["cards"].push_back(ax.card);
    }
    j["probs"] = nest_probs(d, 0, 0, strides_of(d));
    return j;
}

JointDistribution distribution_from(const json& j) {
    if (!j.is_object()) throw ValidationError("distribution_from_json: expected an object");
    for (const char* field : {"axes", "cards", "probs"}) {
        if (!j.contains(field))
            throw ValidationError(std::string("distribution_from_json: missing field '") + field + "'");
    }
    if (!j["axes"].is_array() || !j["cards"].is_array() ||
        j["axes"].size() != j["cards"].size() || j["axes"].empty())
        throw ValidationError("distribution_from_json: fields 'axes' and 'cards' must be equal-length non-empty arrays");
    std::vector<Axis> axes;
    std::vector<std::size_t> cards;
    for (std::size_t i = 0; i < j["axes"].size(); ++i) {
        if (!j["axes"][i].is_string())
            throw ValidationError("distribution_from_json: field 'axes' must contain strings");
        if (!j["cards"][i].is_number_unsigned() || j["cards"][i].get<std::size_t>() == 0)
            throw ValidationError("distribution_from_json: field 'cards' must contain positive integers");
        axes.push_back({j["axes"][i].get<std::string>(), j["cards"][i].get<std::size_t>()});
        cards.push_back(axes.back().card);
    }
    std::vector<double> probs;
    flatten_probs(j["probs"], 0, cards, probs);
    return JointDistribution(std::move(axes), std::move(probs));
}

json estimate_to_json(const ErrorEstimate& e) {
    return json{{"value", e.value},
                {"wilson_ci_95", json::array({e.wilson_ci_95.lo, e.wilson_ci_95.hi})}};
}

json result_to_json(const SimulationResult& r) {
    return json{{"alpha", estimate_to_json(r.alpha)},
                {"beta", estimate_to_json(r.beta)},
                {"trials", r.trials},
                {"decode_error_rate", r.decode_error_rate}};
}

std::string sig12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string to_json(const JointDistribution& d) { return distribution_to_json(d).dump(); }

JointDistribution distribution_from_json(const std::string& text) {
    return distribution_from(parse_or_throw(text, "distribution_from_json"));
}

std::string to_json(const HypothesisPair& hp) {
    json j{{"p", distribution_to_json(hp.p)}, {"q", distribution_to_json(hp.q)}};
    return j.dump();
}

HypothesisPair pair_from_json(const std::string& text) {
    json j = parse_or_throw(text, "pair_from_json");
    if (!j.is_object() || !j.contains("p") || !j.contains("q"))
        throw ValidationError("pair_from_json: fields 'p' and 'q' are required");
    return HypothesisPair(distribution_from(j["p"]), distribution_from(j["q"]));
}

std::string to_json(const TestChannel& w) {
    json rows = json::array();
    for (std::size_t x = 0; x < w.input_card(); ++x) {
        json row = json::array();
        for (std::size_t u = 0; u < w.output_card(); ++u) row.push_back(w(u, x));
        rows.push_back(row);
    }
    json j{{"input_card", w.input_card()}, {"output_card", w.output_card()}, {"probs", rows}};
    return j.dump();
}

TestChannel channel_from_json(const std::string& text) {
    json j = parse_or_throw(text, "channel_from_json");
    for (const char* field : {"input_card", "output_card", "probs"}) {
        if (!j.is_object() || !j.contains(field))
            throw ValidationError(std::string("channel_from_json: missing field '") + field + "'");
    }
    if (!j["input_card"].is_number_unsigned() || !j["output_card"].is_number_unsigned())
        throw ValidationError("channel_from_json: fields 'input_card'/'output_card' must be positive integers");
    std::size_t in = j["input_card"].get<std::size_t>();
    std::size_t outc = j["output_card"].get<std::size_t>();
    if (!j["probs"].is_array() || j["probs"].size() != in)
        throw ValidationError("channel_from_json: field 'probs' must hold one row per input symbol");
    std::vector<double> probs;
    for (const auto& row : j["probs"]) {
        if (!row.is_array() || row.size() != outc)
            throw ValidationError("channel_from_json: field 'probs' rows must match 'output_card'");
        for (const auto& v : row) {
            if (!v.is_number())
                throw ValidationError("channel_from_json: field 'probs' contains a non-number");
            probs.push_back(v.get<double>());
        }
    }
    return TestChannel(in, outc, std::move(probs));
}

std::string to_json(const SimulationResult& r) { return result_to_json(r).dump(); }

std::string to_json(const SequentialSimulationResult& r) {
    json log = json::array();
    for (const auto& [h1, h2] : r.type2_type_entropies) log.push_back(json::array({h1, h2}));
    json j{{"combined", result_to_json(r.combined)},
           {"components", json::array({result_to_json(r.components[0]),
                                       result_to_json(r.components[1])})},
           {"type2_type_entropies", log}};
    return j.dump();
}

std::string to_json(const ExponentCurve& curve) {
    json params = json::object();
    for (const auto& [name, value] : curve.parameters) params[name] = value;
    json j{{"scheme", curve.scheme},
           {"tolerance", curve.tolerance},
           {"parameters", params},
           {"rates", curve.rates},
           {"exponents", curve.exponents}};
    return j.dump();
}

std::string to_csv(const ExponentCurve& curve) {
    std::string out;
    out += "scheme," + curve.scheme + "\r\n";
    out += "tolerance," + sig12(curve.tolerance) + "\r\n";
    for (const auto& [name, value] : curve.parameters)
        out += name + "," + sig12(value) + "\r\n";
    out += "R,E\r\n";
    for (std::size_t i = 0; i < curve.rates.size(); ++i)
        out += sig12(curve.rates[i]) + "," + sig12(curve.exponents[i]) + "\r\n";
    return out;
}

}  // namespace dht
