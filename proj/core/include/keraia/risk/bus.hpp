#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "keraia/json_io.hpp"

namespace keraia::risk {

inline constexpr std::string_view kStateTopic = "datafusion-post";
inline constexpr std::string_view kCommandTopic = "risk";

struct Message {
  std::string topic;
  std::uint64_t seq = 0;  // per-topic publish order
  Json body;
};

// In-process publish/subscribe broker. Each subscriber receives every
// message published on its topic after it subscribed, once, in publish order.
class TopicBus {
 public:
  using SubscriberId = std::size_t;

  SubscriberId subscribe(std::string_view topic);
  void publish(std::string_view topic, Json body);
  std::optional<Message> poll(SubscriberId id);
  std::vector<Message> drain(SubscriberId id);
  std::size_t pending(SubscriberId id) const;
  std::uint64_t published(std::string_view topic) const;

 private:
  struct Subscriber {
    std::string topic;
    std::deque<Message> queue;
  };
  std::vector<Subscriber> subscribers_;
  std::map<std::string, std::uint64_t, std::less<>> counters_;
};

}  // namespace keraia::risk
