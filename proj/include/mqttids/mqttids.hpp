#ifndef MQTTIDS_MQTTIDS_HPP
#define MQTTIDS_MQTTIDS_HPP

#include "mqttids/classifiers.hpp"
#include "mqttids/cli.hpp"
#include "mqttids/common.hpp"
#include "mqttids/eval.hpp"
#include "mqttids/features.hpp"
#include "mqttids/flow.hpp"
#include "mqttids/labels.hpp"
#include "mqttids/packet.hpp"
#include "mqttids/pcap.hpp"
#include "mqttids/synth.hpp"
#include "mqttids/table.hpp"

#endif  // MQTTIDS_MQTTIDS_HPP
