// Loads the packaging daisy, compiles it, simulates one execution and prints
// the fluency report.
#include <iostream>

#include "madtn/madtn.hpp"

int main() {
  using namespace madtn;
  const auto doc = io::parse_daisy(io::read_file(MADTN_DATA_DIR "/packaging.daisy.json"));
  const Daisy& daisy = doc.daisy;

  const CompiledDaisy compiled = compile_to_stn(daisy, doc.ordering);
  const auto graph = solve(compiled.stn);
  if (!graph) {
    std::cerr << "packaging daisy is inconsistent\n";
    return 1;
  }
  const auto [lo, hi] = graph->bounds(compiled.at(daisy.start_vertex()), compiled.at(daisy.end_vertex()));
  std::cout << "makespan bounds: [" << lo.to_string() << ", " << hi.to_string() << "]\n";

  BehaviorProfile human;
  human.max_reaction = 0.5;
  BehaviorProfile robot;
  robot.max_reaction = 1.0;
  robot.anticipation_probability = 0.3;
  robot.anticipation_offset = 0.5;

  const Trace trace = simulate(daisy, *doc.ordering, greedy_assign(daisy, {}),
                               {{"human", human}, {"robot", robot}}, 42);
  const FluencyReport report = fluency_report(trace, daisy);
  std::cout << io::report_to_json(report).dump(2) << "\n";
  return 0;
}
