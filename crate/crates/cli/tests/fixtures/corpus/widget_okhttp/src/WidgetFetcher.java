package com.demo.widget;

import okhttp3.Request;

public class WidgetFetcher {
    Request weather() {
        return new Request.Builder().url("https://api.weather-demo.com/v2/alerts#latest").build();
    }

    Request headlines() {
        return new Request.Builder().url("https://feed-demo.io/v1/items?limit=5").build();
    }
}
