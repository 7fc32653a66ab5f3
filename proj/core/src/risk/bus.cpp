#include "keraia/risk/bus.hpp"

#include "keraia/error.hpp"

namespace keraia::risk {

TopicBus::SubscriberId TopicBus::subscribe(std::string_view topic) {
  subscribers_.push_back({std::string(topic), {}});
  return subscribers_.size() - 1;
}

void TopicBus::publish(std::string_view topic, Json body) {
  auto it = counters_.find(topic);
  if (it == counters_.end()) it = counters_.emplace(std::string(topic), 0).first;
  Message m{std::string(topic), it->second++, std::move(body)};
  for (auto& s : subscribers_) {
    if (s.topic == topic) s.queue.push_back(m);
  }
}

std::optional<Message> TopicBus::poll(SubscriberId id) {
  if (id >= subscribers_.size()) throw Error(ErrorCode::InvalidArgument, "unknown subscriber");
  auto& q = subscribers_[id].queue;
  if (q.empty()) return std::nullopt;
  Message m = std::move(q.front());
  q.pop_front();
  return m;
}

std::vector<Message> TopicBus::drain(SubscriberId id) {
  std::vector<Message> out;
  while (auto m = poll(id)) out.push_back(std::move(*m));
  return out;
}

std::size_t TopicBus::pending(SubscriberId id) const {
  if (id >= subscribers_.size()) throw Error(ErrorCode::InvalidArgument, "unknown subscriber");
  return subscribers_[id].queue.size();
}

std::uint64_t TopicBus::published(std::string_view topic) const {
  auto it = counters_.find(topic);
  return it == counters_.end() ? 0 : it->second;
}

}  // namespace keraia::risk
