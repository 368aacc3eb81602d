#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fsnap/serialize.hpp"

using namespace fsnap;

TEST(Serialize, TraceRoundTrip) {
  const auto f = make_function("sum-mod:10", 3);
  const auto programs = fuzz_programs(3, 3, 17);
  RandomSchedule sched(17);
  const auto run = run_simulated(SimConfig{3, &f, 4}, programs, sched);
  const TraceMeta meta{3, "sum-mod:10", 4, Mutation::skip_null_clear, programs};
  std::istringstream in(trace_to_jsonl(meta, run.trace));
  const auto tf = parse_trace_jsonl(in);
  EXPECT_EQ(tf.events, run.trace);
  EXPECT_EQ(tf.meta.n, 3u);
  EXPECT_EQ(tf.meta.x0, 4u);
  EXPECT_EQ(tf.meta.mutation, Mutation::skip_null_clear);
  EXPECT_EQ(tf.meta.programs, programs);
}

TEST(Serialize, IdentityAnswersRoundTrip) {
  const auto f = make_function("identity", 2);
  const auto programs = alternating_programs(2, 2);
  RandomSchedule sched(1);
  const auto run = run_simulated(SimConfig{2, &f, 0}, programs, sched);
  const TraceMeta meta{2, "identity", 0, Mutation::none, programs};
  std::istringstream in(trace_to_jsonl(meta, run.trace));
  EXPECT_EQ(parse_trace_jsonl(in).events, run.trace);

  std::istringstream hin(history_to_jsonl(run.history));
  EXPECT_EQ(history_from_jsonl(hin), run.history);
}

TEST(Serialize, BadInput) {
  std::istringstream no_meta("{\"step\":0}\n");
  EXPECT_THROW(parse_trace_jsonl(no_meta), Error);
  std::istringstream garbage("not json\n");
  EXPECT_THROW(parse_trace_jsonl(garbage), Error);
  std::istringstream bad_history("{\"kind\":\"invoke\"}\n");
  EXPECT_THROW(history_from_jsonl(bad_history), MalformedHistory);
}

TEST(Serialize, AtomicWriteLeavesNoTemporary) {
  const auto dir = std::filesystem::temp_directory_path() / "fsnap_serialize_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.json";
  write_file_atomically(path, "first\n");
  write_file_atomically(path, "second\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "second");
  EXPECT_FALSE(std::filesystem::exists(dir / "out.json.tmp"));
  std::filesystem::remove_all(dir);
}
