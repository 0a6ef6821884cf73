package com.example;

import retrofit2.Retrofit;

public class Api {
    static final String BASE = "http://retrofiturl.com";

    UserService service() {
        Retrofit r = new Retrofit.Builder().baseUrl(BASE).build();
        return r.create(UserService.class);
    }
}
