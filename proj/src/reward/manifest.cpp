#include <fstream>
#include <sstream>

#include "cadseq/reward.hpp"

namespace cadseq {

namespace {

std::optional<std::string> read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string read_or_throw(const std::filesystem::path &path, ErrorCode code) {
  std::optional<std::string> text = read_file(path);
  if (!text) throw Error(code, "cannot read " + path.string());
  return std::move(*text);
}

CadModel read_model(const std::filesystem::path &path) {
  const std::string text = read_or_throw(path, ErrorCode::InvalidTarget);
  ParseOutcome parsed = parse(text, repr_from_path(path.string()).value_or(ReprKind::Json));
  if (!parsed) throw Error(ErrorCode::InvalidTarget, path.string() + ": " + parsed.error().describe());
  return std::move(parsed.model());
}

}  // namespace

std::vector<ScoreItem> parse_reward_manifest(std::string_view text, const std::filesystem::path &base) {
  std::vector<ScoreItem> items;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> f;
    for (std::string w; fields >> w;) f.push_back(w);
    if (f.empty() || f.front().front() == '#') continue;
    if (f.size() < 2 || f.size() > 4) {
      throw Error(ErrorCode::InvalidArgument, "reward manifest line " + std::to_string(line_no) +
                                                  ": expected '<generated> <target> [<current> [<script>]]'");
    }
    ScoreItem item;
    item.generated = read_file(base / f[0]).value_or(std::string{});
    item.target = read_model(base / f[1]);
    if (f.size() >= 3) item.current = read_model(base / f[2]);
    if (f.size() == 4) {
      const std::filesystem::path path = base / f[3];
      const std::string script = read_or_throw(path, ErrorCode::InvalidArgument);
      item.script = path.extension() == ".json" ? script_from_json(script) : parse_script(script);
    }
    item.episode = items.size();
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<ScoreItem> read_reward_manifest(const std::filesystem::path &manifest) {
  return parse_reward_manifest(read_or_throw(manifest, ErrorCode::InvalidArgument), manifest.parent_path());
}

}  // namespace cadseq
