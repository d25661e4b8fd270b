#pragma once

#include <string>

#include "cdn/network.hpp"

namespace cdn {

namespace detail {

inline std::string unit_act_name(const NetworkGraph& net, UnitAct a)
{
    switch (a) {
    case UnitAct::identity: return "identity";
    case UnitAct::heaviside: return "heaviside";
    case UnitAct::sigma: return net.sigma.name();
    }
    return "?";
}

inline std::string field(const std::string& path, const std::string& what)
{
    return "field " + path + ": " + what;
}

template <typename T>
T get_field(const nlohmann::json& j, const char* key, const std::string& path)
{
    if (!j.is_object() || !j.contains(key))
        throw Error(field(path + "." + key, "missing"));
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(field(path + "." + key, "wrong type"));
    }
}

inline std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace detail

/// JSON document: {d, sigma, layers:[{units:[{w, b, act}]}], output, meta}.
inline std::string serialize(const NetworkGraph& net)
{
    using nlohmann::json;
    json doc;
    doc["d"] = net.d;
    json sig = {{"kind", net.sigma.name()}, {"k0", net.sigma.k0()}, {"b0", net.sigma.b0()}};
    if (net.sigma.kind() == Kind::gompertz) {
        sig["gompertz_a"] = net.sigma.gompertz().a;
        sig["gompertz_b"] = net.sigma.gompertz().b;
    }
    doc["sigma"] = sig;
    json layers = json::array();
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        json units = json::array();
        std::size_t fan = net.width(l);
        for (const auto& u : net.layers[l].units) {
            std::vector<double> dense(fan, 0.0);
            for (std::size_t i = 0; i < u.src.size(); ++i)
                dense[u.src[i]] = u.w[i];
            units.push_back({{"w", dense}, {"b", u.bias}, {"act", detail::unit_act_name(net, u.act)}});
        }
        layers.push_back({{"units", units}});
    }
    doc["layers"] = layers;
    doc["output"] = net.output;
    json meta = net.meta.is_object() ? net.meta : json::object();
    meta["param_count"] = audit(net).count;
    doc["meta"] = meta;
    return doc.dump(1);
}

inline NetworkGraph parse(const std::string& text)
{
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = detail::line_col(text, e.byte);
        throw Error("parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
    }
    if (!doc.is_object())
        throw Error(detail::field("$", "document must be an object"));

    int d = detail::get_field<int>(doc, "d", "$");
    if (d < 1)
        throw Error(detail::field("$.d", "must be positive"));

    // Sigma kind from the header, or from the first sigmoid unit.
    std::string kind_name;
    int k0 = 5;
    double b0 = 0.0;
    bool has_b0 = false;
    GompertzParams gp;
    if (doc.contains("sigma")) {
        const json& s = doc["sigma"];
        kind_name = detail::get_field<std::string>(s, "kind", "$.sigma");
        if (s.contains("k0"))
            k0 = detail::get_field<int>(s, "k0", "$.sigma");
        if (s.contains("b0")) {
            b0 = detail::get_field<double>(s, "b0", "$.sigma");
            has_b0 = true;
        }
        if (s.contains("gompertz_a"))
            gp.a = detail::get_field<double>(s, "gompertz_a", "$.sigma");
        if (s.contains("gompertz_b"))
            gp.b = detail::get_field<double>(s, "gompertz_b", "$.sigma");
    }

    if (!doc.contains("layers") || !doc["layers"].is_array())
        throw Error(detail::field("$.layers", "missing or not an array"));
    const json& jl = doc["layers"];

    auto unit_kind = [&](const std::string& act, const std::string& path) -> UnitAct {
        if (act == "identity")
            return UnitAct::identity;
        if (act == "heaviside")
            return UnitAct::heaviside;
        Kind k;
        try {
            k = parse_kind(act);
        } catch (const Error&) {
            throw Error(detail::field(path, "unknown activation '" + act + "'"));
        }
        if (kind_name.empty())
            kind_name = act;
        else if (kind_name != act)
            throw Error(detail::field(path, "mixed sigmoid kinds '" + kind_name + "' and '" + act + "'"));
        (void)k;
        return UnitAct::sigma;
    };

    std::vector<Layer> layers;
    std::size_t fan = static_cast<std::size_t>(d);
    for (std::size_t l = 0; l < jl.size(); ++l) {
        std::string lpath = "$.layers[" + std::to_string(l) + "]";
        if (!jl[l].is_object() || !jl[l].contains("units") || !jl[l]["units"].is_array())
            throw Error(detail::field(lpath + ".units", "missing or not an array"));
        const json& ju = jl[l]["units"];
        Layer layer;
        for (std::size_t u = 0; u < ju.size(); ++u) {
            std::string upath = lpath + ".units[" + std::to_string(u) + "]";
            auto w = detail::get_field<std::vector<double>>(ju[u], "w", upath);
            if (w.size() != fan)
                throw Error(detail::field(upath + ".w", "expected " + std::to_string(fan) + " entries, got " + std::to_string(w.size())));
            Unit unit;
            unit.bias = detail::get_field<double>(ju[u], "b", upath);
            unit.act = unit_kind(detail::get_field<std::string>(ju[u], "act", upath), upath + ".act");
            for (std::size_t i = 0; i < w.size(); ++i)
                unit.connect(i, w[i]);
            layer.units.push_back(std::move(unit));
        }
        fan = layer.width();
        layers.push_back(std::move(layer));
    }

    auto output = detail::get_field<std::vector<double>>(doc, "output", "$");
    if (output.size() != fan)
        throw Error(detail::field("$.output", "expected " + std::to_string(fan) + " entries, got " + std::to_string(output.size())));

    ActivationSpec act;
    if (!kind_name.empty()) {
        Kind k;
        try {
            k = parse_kind(kind_name);
        } catch (const Error&) {
            throw Error(detail::field("$.sigma.kind", "unknown activation '" + kind_name + "'"));
        }
        if (k == Kind::heaviside)
            throw Error(detail::field("$.sigma.kind", "heaviside cannot be the smooth activation"));
        act = has_b0 ? ActivationSpec::restore(k, k0, b0, gp) : ActivationSpec::make(k, k0, gp);
    }

    NetworkGraph net(d, act);
    net.layers = std::move(layers);
    net.output = std::move(output);
    if (doc.contains("meta"))
        net.meta = doc["meta"];
    validate(net);
    return net;
}

} // namespace cdn
