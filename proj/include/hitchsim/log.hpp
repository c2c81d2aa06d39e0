#pragma once

#include <vector>

#include "hitchsim/demand.hpp"
#include "hitchsim/dispatch.hpp"

namespace hitchsim {

enum class EventType { Pickup, Dropoff, Depart, Park };
const char* to_string(EventType e);

struct EventRecord {
  double t = 0;
  int vehicle_id = -1;
  EventType type = EventType::Pickup;
  int request_id = -1;  // -1 for Depart/Park
  int node = 0;
};

struct Traversal {
  int vehicle_id;
  int link_idx;
  double t_entry, t_exit;
};

struct RunLog {
  std::vector<EventRecord> events;
  std::vector<Traversal> traversals;
  std::vector<AssignmentDecision> decisions;
  std::vector<Request> requests;  // final states, input order
  std::vector<int> vehicle_start_nodes;
};

}  // namespace hitchsim
