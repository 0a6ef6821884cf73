package com.demo.shop;

import retrofit2.Call;
import retrofit2.http.GET;

public interface ShopApi {
    @GET("v1/legacy")
    Call<Void> legacy();
}
