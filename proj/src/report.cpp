#include "pdmsym/report.hpp"

#include <fstream>
#include <sstream>

namespace pdm {

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    Json doc = Json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded()) throw IoError("malformed JSON in " + path);
    return doc;
}

void write_json_file(const std::string& path, const Json& doc) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("short write to " + path);
}

}  // namespace pdm
