package io.demo.feed;

import okhttp3.MediaType;
import okhttp3.OkHttpClient;
import okhttp3.Request;
import okhttp3.RequestBody;

public class FeedRepository {
    private static final String ROOT = "https://feed-demo.io/v1";
    private final OkHttpClient client = new OkHttpClient();

    Request latest() {
        return new Request.Builder().url(ROOT + "/items?limit=20").build();
    }

    Request like(RequestBody body) {
        return new Request.Builder().url(ROOT + "/items/like").post(body).build();
    }

    Request live() {
        return new Request.Builder().url("ws://feed-demo.io/live").build();
    }
}
