#include "polytube/polytope_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ptb {

using nlohmann::json;

ConvexPolytope load_polytope_json(const std::string& text, double tol) {
    json j = json::parse(text);
    const int n = j.at("dim").get<int>();
    std::vector<Halfspace> hs;
    for (const auto& item : j.at("halfspaces")) {
        auto coords = item.at("normal").get<std::vector<double>>();
        if (static_cast<int>(coords.size()) != n)
            throw Error("normal dimension mismatch");
        Vec normal(n);
        for (int i = 0; i < n; ++i) normal[i] = coords[i];
        double offset = item.at("offset").get<double>();
        double len = normal.norm();
        if (len < 1e-14) throw NonUnitNormal("zero normal in polytope file");
        hs.push_back({normal / len, offset / len});
    }
    std::string name = j.value("name", "");
    return build_polytope(hs, tol, name);
}

ConvexPolytope load_polytope_file(const std::string& path, double tol) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open polytope file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_polytope_json(ss.str(), tol);
}

std::string polytope_to_json(const ConvexPolytope& P) {
    json j;
    j["dim"] = P.dim;
    j["name"] = P.name;
    j["halfspaces"] = json::array();
    for (const auto& h : P.halfspaces) {
        json item;
        item["normal"] = std::vector<double>(h.normal.data(),
                                             h.normal.data() + h.normal.size());
        item["offset"] = h.offset;
        j["halfspaces"].push_back(item);
    }
    return j.dump(2);
}

}  // namespace ptb
