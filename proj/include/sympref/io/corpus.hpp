#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sympref/io/jsonl.hpp"
#include "sympref/testgen.hpp"

namespace sympref::io {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

// On-disk task layout, one directory per task:
//   <id>/prompt.txt    natural-language prompt
//   <id>/truth.ml      ground-truth MiniLang source
//   <id>/samples.json  array of sample input tuples
//   <id>/meta.json     {"difficulty": "introductory"|"interview"|"competition"}
inline Task load_task(const fs::path& dir) {
  Task task;
  task.id = dir.filename().string();
  task.prompt = read_file(dir / "prompt.txt");
  task.ground_truth = read_file(dir / "truth.ml");

  json samples;
  try {
    samples = json::parse(read_file(dir / "samples.json"));
  } catch (const json::exception& e) {
    throw DataError(task.id + "/samples.json: " + e.what());
  }
  if (!samples.is_array()) throw DataError(task.id + "/samples.json: expected an array");
  for (const auto& tuple : samples) task.samples.push_back(tuple_from_json(tuple));

  json meta;
  try {
    meta = json::parse(read_file(dir / "meta.json"));
  } catch (const json::exception& e) {
    throw DataError(task.id + "/meta.json: " + e.what());
  }
  const auto difficulty = difficulty_from(meta.at("difficulty").get<std::string>());
  if (!difficulty)
    throw DataError(task.id + "/meta.json: unknown difficulty '" +
                    meta.at("difficulty").get<std::string>() + "'");
  task.difficulty = *difficulty;
  return task;
}

// Loads every task directory under root, sorted by id for reproducibility.
inline std::vector<Task> load_corpus(const fs::path& root) {
  if (!fs::is_directory(root)) throw DataError("corpus directory not found: " + root.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  std::vector<Task> tasks;
  for (const auto& dir : dirs) tasks.push_back(load_task(dir));
  if (tasks.empty()) throw DataError("no task directories under " + root.string());
  return tasks;
}

}  // namespace sympref::io
