package io.demo.tracker;

import com.google.gson.annotations.SerializedName;

public class Event {
    @SerializedName("name")
    String name;
    long timestamp;
    boolean debug = true;
}
